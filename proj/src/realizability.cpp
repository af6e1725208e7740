#include "limp/realizability.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "limp/errors.hpp"
#include "limp/text.hpp"

namespace limp {

void validate(const Budget& b) {
    if (b.max_samples == 0 || b.fuel == 0 || b.max_term_size == 0)
        throw InputInvalid("budget fields must be positive");
}

const char* membership_name(Membership m) {
    switch (m) {
    case Membership::Yes: return "yes";
    case Membership::No: return "no";
    case Membership::Unknown: return "unknown";
    }
    return "?";
}

Result result_of(const RunOutcome& o) {
    if (o.kind != RunOutcome::Kind::Converged) return {};
    return {false, o.value, o.store};
}

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

std::uint64_t derive(std::uint64_t seed, const std::string& tag, std::uint64_t n = 0) {
    return mix(seed ^ mix(fnv(tag) + n));
}

// ---- closed value enumeration

struct Enumerator {
    std::vector<Loc> locs;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Value>> vmemo;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Comp>> cmemo;

    static std::string name(std::size_t k) { return "x" + std::to_string(k); }

    const std::vector<Value>& values(std::size_t n, std::size_t depth) {
        auto key = std::make_pair(n, depth);
        if (auto it = vmemo.find(key); it != vmemo.end()) return it->second;
        std::vector<Value> out;
        if (n == 1) {
            for (std::size_t k = 0; k < depth; ++k) out.push_back(var(name(k)));
        } else if (n > 1) {
            for (const auto& b : comps(n - 1, depth + 1)) out.push_back(lam(name(depth), b));
        }
        return vmemo.emplace(key, std::move(out)).first->second;
    }

    const std::vector<Comp>& comps(std::size_t n, std::size_t depth) {
        auto key = std::make_pair(n, depth);
        if (auto it = cmemo.find(key); it != cmemo.end()) return it->second;
        std::vector<Comp> out;
        if (n >= 2) {
            for (const auto& v : values(n - 1, depth)) out.push_back(unit(v));
            for (Loc l : locs)
                for (const auto& b : comps(n - 1, depth + 1)) out.push_back(get(l, name(depth), b));
            for (std::size_t k = 1; k + 1 < n; ++k) {
                const auto& ms = comps(k, depth);
                const auto& vs = values(n - 1 - k, depth);
                for (const auto& m : ms)
                    for (const auto& v : vs) out.push_back(bind(m, v));
                for (Loc l : locs)
                    for (const auto& v : values(k, depth))
                        for (const auto& m : comps(n - 1 - k, depth)) out.push_back(set(l, v, m));
            }
        }
        return cmemo.emplace(key, std::move(out)).first->second;
    }
};

// Rough count guard: the slice is cut once it gets this large.
constexpr std::size_t kEnumerationCap = 200000;

void collect_raw_locs(const Raw& t, LocSet& out) {
    if (!t) return;
    if (t->kind == RawNode::Kind::Rec) out.insert(t->loc);
    collect_raw_locs(t->a, out);
    collect_raw_locs(t->b, out);
}

void collect_store_locs(const Store& s, LocSet& out);
void collect_value_locs(const Value& v, LocSet& out) {
    if (v->kind == ValueNode::Kind::Lam) collect_locs(v->body, out);
}
void collect_lookup_locs(const Lookup& u, LocSet& out) {
    if (u->kind == LookupNode::Kind::Val) {
        collect_value_locs(u->val, out);
    } else {
        out.insert(u->loc);
        collect_store_locs(u->store, out);
    }
}
void collect_store_locs(const Store& s, LocSet& out) {
    for (const StoreNode* p = s.get(); p->kind == StoreNode::Kind::Upd; p = p->rest.get()) {
        out.insert(p->loc);
        collect_lookup_locs(p->entry, out);
    }
}

std::string observed_name(const RunOutcome& o) { return outcome_name(o.kind); }

}  // namespace

std::vector<Value> enumerate_closed_values(std::size_t n, const LocSet& locs) {
    Enumerator e{{locs.begin(), locs.end()}, {}, {}};
    std::vector<Value> out;
    for (std::size_t k = 1; k <= n; ++k) {
        const auto& vs = e.values(k, 0);
        if (out.size() + vs.size() > kEnumerationCap) break;
        out.insert(out.end(), vs.begin(), vs.end());
    }
    return out;
}

// ------------------------------------------------------------ Realizer

Realizer::Realizer(Budget b, std::uint64_t seed, LocSet locs) : budget_(b), seed_(seed), locs_(std::move(locs)) {
    validate(b);
}

namespace {
unsigned rank_c(const CType& t);
unsigned rank_v(const VType& d) {
    unsigned r = 0;
    for (const auto& [a, b] : d->arrows) r = std::max({r, 1 + rank_v(a), 1 + rank_c(b)});
    return r;
}
unsigned rank_s(const SType& s) {
    unsigned r = 0;
    for (const auto& [l, d] : s->entries) r = std::max(r, rank_v(d));
    return r;
}
unsigned rank_c(const CType& t) {
    unsigned r = 0;
    for (const auto& [a, k] : t->arrows) {
        r = std::max(r, rank_s(a));
        if (!k->top) r = std::max({r, rank_v(k->d), rank_s(k->s)});
    }
    return r;
}
}  // namespace

unsigned Realizer::rank(const VType& d) { return rank_v(d); }
unsigned Realizer::rank(const SType& s) { return rank_s(s); }

std::size_t Realizer::samples_at(unsigned r) const {
    std::size_t n = r >= 63 ? 0 : budget_.max_samples >> r;
    return std::max<std::size_t>(1, n);
}

MembershipVerdict Realizer::verdict(Membership m, bool exhaustive) const {
    MembershipVerdict v;
    v.verdict = m;
    v.exhaustive = exhaustive;
    v.budget = budget_;
    v.seed = seed_;
    return v;
}

void Realizer::note_locs(const Raw& t) {
    LocSet before = locs_;
    collect_raw_locs(t, locs_);
    if (locs_ != before) enumerated_ = false;
}

const std::vector<Value>& Realizer::closed_values() {
    if (!enumerated_) {
        LocSet locs = locs_;
        if (locs.empty()) locs.insert(0);
        enumeration_ = enumerate_closed_values(budget_.max_term_size, locs);
        enumerated_ = true;
        value_cache_.clear();
        store_cache_.clear();
        verdict_cache_.clear();
    }
    return enumeration_;
}

namespace {

// Conjunction, keeping the first refutation.
struct Conj {
    MembershipVerdict acc;
    bool done() const { return acc.verdict == Membership::No; }
    void add(const MembershipVerdict& v) {
        if (done()) return;
        acc.exhaustive = acc.exhaustive && v.exhaustive;
        if (v.verdict == Membership::No) {
            acc.verdict = Membership::No;
            acc.witness = v.witness;
        } else if (v.verdict == Membership::Unknown) {
            acc.verdict = Membership::Unknown;
        }
    }
};

MembershipVerdict with_probe(MembershipVerdict v, Probe p) {
    if (v.witness) v.witness->inputs.insert(v.witness->inputs.begin(), std::move(p));
    return v;
}

MembershipVerdict refuted(MembershipVerdict base, std::string observed) {
    base.verdict = Membership::No;
    base.witness = Witness{{}, std::move(observed)};
    return base;
}

}  // namespace

MembershipVerdict Realizer::mv(const Value& v, const VType& d, std::uint64_t seed) {
    if (d->arrows.empty()) return verdict(Membership::Yes, true);
    std::string key = "v|" + nameless_key(v) + "|" + d->key;
    if (auto it = verdict_cache_.find(key); it != verdict_cache_.end()) return it->second;
    Conj c{verdict(Membership::Yes, true)};
    for (const auto& [dom, cod] : d->arrows) {
        const Sample& ws = values_for(dom);
        if (ws.values.empty()) {
            c.add(verdict(Membership::Unknown, false));
            continue;
        }
        if (!ws.full) c.acc.exhaustive = false;
        for (std::size_t i = 0; i < ws.values.size() && !c.done(); ++i) {
            const Value& w = ws.values[i];
            MembershipVerdict r = mc(bind(unit(w), v), cod, derive(seed, dom->key, i));
            c.add(with_probe(r, {Probe::Kind::Argument, w, nullptr}));
        }
        if (c.done()) break;
    }
    c.acc.seed = seed_;
    verdict_cache_.emplace(key, c.acc);
    return c.acc;
}

MembershipVerdict Realizer::ms(const Store& s, const SType& d, std::uint64_t seed) {
    Conj c{verdict(Membership::Yes, true)};
    for (const auto& [l, dl] : d->entries) {
        if (!in_dom(l, s)) return refuted(verdict(Membership::No, true), render_loc(l) + " not in dom");
        c.add(mv(resolve_lookup(l, s), dl, derive(seed, "loc", l)));
        if (c.done()) break;
    }
    return c.acc;
}

MembershipVerdict Realizer::mk(const Result& r, const KType& k, std::uint64_t seed) {
    if (k->top) return verdict(Membership::Yes, true);
    if (r.bottom) return refuted(verdict(Membership::No, true), "bottom");
    Conj c{verdict(Membership::Yes, true)};
    c.add(mv(r.value, k->d, derive(seed, "value")));
    if (!c.done()) c.add(ms(r.store, k->s, derive(seed, "store")));
    return c.acc;
}

MembershipVerdict Realizer::mc(const Comp& m, const CType& t, std::uint64_t seed) {
    if (t->arrows.empty()) return verdict(Membership::Yes, true);
    std::string key = "c|" + nameless_key(m) + "|" + t->key;
    if (auto it = verdict_cache_.find(key); it != verdict_cache_.end()) return it->second;
    Conj c{verdict(Membership::Yes, true)};
    for (const auto& [dom, cod] : t->arrows) {
        const StoreSample& ss = stores_for(dom);
        if (ss.stores.empty()) {
            c.add(verdict(Membership::Unknown, false));
            continue;
        }
        if (!ss.full) c.acc.exhaustive = false;
        for (std::size_t i = 0; i < ss.stores.size() && !c.done(); ++i) {
            const Store& s = ss.stores[i];
            RunOutcome o = run({m, s}, budget_.fuel);
            MembershipVerdict r = mk(result_of(o), cod, derive(seed, dom->key, i));
            if (r.verdict == Membership::No && r.witness && r.witness->observed == "bottom")
                r.witness->observed = observed_name(o);
            c.add(with_probe(r, {Probe::Kind::Store, nullptr, s}));
        }
        if (c.done()) break;
    }
    c.acc.seed = seed_;
    verdict_cache_.emplace(key, c.acc);
    return c.acc;
}

const Realizer::Sample& Realizer::values_for(const VType& d) {
    const std::vector<Value>& all = closed_values();
    const std::string& key = d->key;
    if (auto it = value_cache_.find(key); it != value_cache_.end()) return it->second;
    std::size_t want = samples_at(rank(d));
    // The smallest half in order, then a seeded shuffle of the remainder.
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t head = std::min(all.size(), (want + 1) / 2);
    std::mt19937_64 rng(derive(seed_, "values|" + key));
    std::shuffle(order.begin() + static_cast<std::ptrdiff_t>(head), order.end(), rng);
    Sample out;
    bool full = all.size() < kEnumerationCap;
    std::size_t i = 0;
    for (; i < order.size() && out.values.size() < want && i < 4 * want; ++i) {
        const Value& v = all[order[i]];
        MembershipVerdict m = mv(v, d, derive(seed_, "gen|" + nameless_key(v)));
        if (m.verdict == Membership::Yes) out.values.push_back(v);
        if (m.verdict == Membership::Unknown || !m.exhaustive) full = false;
    }
    out.full = full && i == order.size();
    return value_cache_.emplace(key, std::move(out)).first->second;
}

const Realizer::StoreSample& Realizer::stores_for(const SType& s) {
    const std::string& key = s->key;
    if (auto it = store_cache_.find(key); it != store_cache_.end()) return it->second;
    std::size_t want = samples_at(rank(s));
    std::vector<std::pair<Loc, const Sample*>> entries;
    for (const auto& [l, d] : s->entries) {
        const Sample& vs = values_for(d);
        if (vs.values.empty()) throw EmptyGenerator("no value found for " + render_loc(l) + " within budget");
        entries.emplace_back(l, &vs);
    }
    const Sample& any = values_for(v_top());
    LocSet pool = locs_;
    if (pool.empty()) pool.insert(0);
    std::vector<Loc> extra;
    for (Loc l : pool)
        if (!s->entries.count(l)) extra.push_back(l);
    Loc next = *pool.rbegin() + 1;
    while (extra.size() < 2) extra.push_back(next++);

    std::mt19937_64 rng(derive(seed_, "stores|" + key));
    StoreSample out;
    std::set<std::string> seen;
    for (std::size_t i = 0; out.stores.size() < want && i < 4 * want; ++i) {
        Store st = emp();
        if (i > 0) {
            std::size_t n_extra = rng() % 3;
            std::vector<Loc> ex = extra;
            std::shuffle(ex.begin(), ex.end(), rng);
            for (std::size_t k = 0; k < n_extra && k < ex.size(); ++k)
                st = upd(ex[k], any.values[rng() % any.values.size()], st);
        }
        for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
            const auto& vals = it->second->values;
            const Value& v = i == 0 ? vals.front() : vals[rng() % vals.size()];
            st = upd(it->first, v, st);
        }
        if (seen.insert(store_key(st)).second) out.stores.push_back(st);
    }
    return store_cache_.emplace(key, std::move(out)).first->second;
}

MembershipVerdict Realizer::member(const Value& v, const Raw& delta) {
    if (!closed(v)) throw OpenTerm("membership needs a closed value");
    Type t = normalize_type(delta);
    if (t.sort != Sort::D) throw SortMismatch("a value is tested against a value type");
    note_locs(delta);
    LocSet before = locs_;
    collect_value_locs(v, locs_);
    if (locs_ != before) enumerated_ = false;
    closed_values();
    return mv(v, t.d, derive(seed_, "root"));
}

MembershipVerdict Realizer::member(const Store& s, const Raw& sigma) {
    if (!closed(s)) throw OpenTerm("membership needs a closed store");
    Type t = normalize_type(sigma);
    if (t.sort != Sort::S) throw SortMismatch("a store is tested against a store type");
    note_locs(sigma);
    LocSet before = locs_;
    collect_store_locs(s, locs_);
    if (locs_ != before) enumerated_ = false;
    closed_values();
    return ms(s, t.s, derive(seed_, "root"));
}

MembershipVerdict Realizer::member(const Result& r, const Raw& kappa) {
    Type t = normalize_type(kappa);
    if (t.sort != Sort::C) throw SortMismatch("a result is tested against a result type");
    note_locs(kappa);
    closed_values();
    return mk(r, t.k, derive(seed_, "root"));
}

MembershipVerdict Realizer::member(const Comp& m, const Raw& tau) {
    if (!closed(m)) throw OpenTerm("membership needs a closed computation");
    Type t = normalize_type(tau);
    if (t.sort != Sort::T) throw SortMismatch("a computation is tested against a computation type");
    note_locs(tau);
    LocSet before = locs_;
    collect_locs(m, locs_);
    if (locs_ != before) enumerated_ = false;
    closed_values();
    return mc(m, t.t, derive(seed_, "root"));
}

std::vector<Value> Realizer::gen_values(const Raw& delta) {
    Type t = normalize_type(delta);
    if (t.sort != Sort::D) throw SortMismatch("gen_values needs a value type");
    note_locs(delta);
    closed_values();
    return values_for(t.d).values;
}

std::vector<Store> Realizer::gen_stores(const Raw& sigma) {
    Type t = normalize_type(sigma);
    if (t.sort != Sort::S) throw SortMismatch("gen_stores needs a store type");
    note_locs(sigma);
    closed_values();
    return stores_for(t.s).stores;
}

MembershipVerdict member(const Value& v, const Raw& delta, const Budget& b, std::uint64_t seed) {
    return Realizer(b, seed).member(v, delta);
}
MembershipVerdict member(const Store& s, const Raw& sigma, const Budget& b, std::uint64_t seed) {
    return Realizer(b, seed).member(s, sigma);
}
MembershipVerdict member(const Result& r, const Raw& kappa, const Budget& b, std::uint64_t seed) {
    return Realizer(b, seed).member(r, kappa);
}
MembershipVerdict member(const Comp& m, const Raw& tau, const Budget& b, std::uint64_t seed) {
    return Realizer(b, seed).member(m, tau);
}
std::vector<Value> gen_values(const Raw& delta, const Budget& b, std::uint64_t seed) {
    return Realizer(b, seed).gen_values(delta);
}
std::vector<Store> gen_stores(const Raw& sigma, const Budget& b, std::uint64_t seed) {
    return Realizer(b, seed).gen_stores(sigma);
}

// --------------------------------------------------------- falsification

std::optional<Counterexample> falsify_compLemma(const Context& g, const Deriv& d, const Budget& b, std::uint64_t seed,
                                                bool check) {
    validate(b);
    if (d->subject.kind != Subject::Kind::Comp) throw InputInvalid("derivation must type a computation");
    if (check) {
        CheckResult r = check_derivation(g, d);
        if (!r.ok) throw InputInvalid("derivation does not check: " + r.describe());
    }
    const Comp& m = d->subject.comp;
    for (const auto& x : free_vars(m))
        if (!g.count(x)) throw InputInvalid("free variable " + x + " is not in the context");

    LocSet locs;
    collect_locs(m, locs);
    collect_raw_locs(d->type, locs);
    for (const auto& [x, e] : g) collect_raw_locs(e.raw, locs);
    Realizer rz(b, seed, locs);

    std::vector<std::pair<std::string, std::vector<Value>>> pools;
    for (const auto& [x, e] : g) {
        if (!is_free(x, m)) continue;
        auto vs = rz.gen_values(e.raw);
        if (vs.empty()) return std::nullopt;  // nothing to instantiate with
        pools.emplace_back(x, std::move(vs));
    }
    std::mt19937_64 rng(derive(seed, "falsify"));
    std::set<std::string> tried;
    for (std::size_t i = 0; i < b.max_samples; ++i) {
        std::map<std::string, Value> sub;
        Comp inst = m;
        std::string key;
        for (const auto& [x, vs] : pools) {
            const Value& v = i == 0 ? vs.front() : vs[rng() % vs.size()];
            sub.emplace(x, v);
            key += nameless_key(v) + ";";
        }
        if (!tried.insert(key).second) continue;
        for (const auto& [x, v] : sub) inst = substitute(inst, x, v);
        MembershipVerdict mv = rz.member(inst, d->type);
        if (mv.verdict == Membership::No) return Counterexample{sub, inst, mv.witness.value_or(Witness{})};
        if (pools.empty()) break;
    }
    return std::nullopt;
}

}  // namespace limp
