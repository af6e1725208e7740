#include "limp/suites.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "limp/errors.hpp"
#include "limp/generators.hpp"
#include "limp/realizability.hpp"
#include "limp/rewrite.hpp"
#include "limp/subtype_oracle.hpp"
#include "limp/text.hpp"
#include "limp/typing.hpp"

#ifndef LIMP_GOLDEN_DIR
#define LIMP_GOLDEN_DIR "golden"
#endif

namespace limp {

std::string default_golden_dir() { return LIMP_GOLDEN_DIR; }

namespace {

struct Tally {
    SuiteReport r;
    void check(bool ok, const std::function<std::string()>& what) {
        ++r.cases;
        if (ok) return;
        ++r.failures;
        if (r.examples.size() < 5) r.examples.push_back(what());
    }
};

std::string cfg(const Configuration& c) { return render(c); }

// ------------------------------------------------------------ criterion 1

SuiteReport bigsmall(const SuiteOptions& opt) {
    Tally t;
    Rng rng(opt.seed);
    TermShape shape{20, {0, 1, 2}};
    std::size_t stats[3] = {0, 0, 0};
    for (int i = 0; i < 1000; ++i) {
        Configuration c = random_config(rng, shape);
        RunOutcome a = run(c, 500);
        RunOutcome b = eval_big(c, 500);
        ++stats[static_cast<int>(a.kind)];
        bool ok = a.kind == b.kind;
        if (ok && a.kind == RunOutcome::Kind::Converged)
            ok = alpha_eq(a.value, b.value) && store_eq(a.store, b.store);
        t.check(ok, [&] {
            return cfg(c) + ": run " + outcome_name(a.kind) + ", eval_big " + outcome_name(b.kind);
        });
    }
    t.r.detail = std::to_string(stats[0]) + " converged, " + std::to_string(stats[1]) + " blocked, " +
                 std::to_string(stats[2]) + " out of fuel";
    return t.r;
}

// ------------------------------------------------------------ criterion 2

std::vector<Value> store_values() { return {parse_value("\\x. unit x"), parse_value("\\x. unit x >>= x")}; }

SuiteReport stores(const SuiteOptions&) {
    Tally t;
    std::vector<Store> all = enumerate_stores({0, 1}, store_values(), 6);
    std::size_t equal = 0;
    for (const auto& s : all)
        for (const auto& u : all) {
            bool a = store_eq(s, u), b = ext_equiv(s, u), c = rewrite_oracle(s, u, 8);
            equal += a;
            t.check(a == b && b == c, [&] {
                return render(s) + " vs " + render(u) + ": store_eq " + std::to_string(a) + ", ext_equiv " +
                       std::to_string(b) + ", rewriting " + std::to_string(c);
            });
        }
    t.r.detail = std::to_string(all.size()) + " stores, " + std::to_string(equal) + " equal pairs";
    return t.r;
}

// ------------------------------------------------------------ criterion 3

template <class T, class F>
std::vector<T> meet_close(std::map<std::string, T> m, F meet) {
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<T> xs;
        for (auto& [k, v] : m) xs.push_back(v);
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = i + 1; j < xs.size(); ++j) {
                T c = meet(xs[i], xs[j]);
                if (m.emplace(c->key, c).second) changed = true;
            }
    }
    std::vector<T> out;
    for (auto& [k, v] : m) out.push_back(v);
    return out;
}

bool dom_contains(const LocSet& big, const LocSet& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

SuiteReport subtyping(const SuiteOptions& opt) {
    Tally t;
    constexpr unsigned kOracleDepth = 200;
    TypeEnvelope env = enumerate_types(3, {0, 1});
    std::vector<Type> pool[4];
    for (auto& x : env.d) pool[0].push_back(Type::of(x));
    for (auto& x : env.s) pool[1].push_back(Type::of(x));
    for (auto& x : env.k) pool[2].push_back(Type::of(x));
    for (auto& x : env.t) pool[3].push_back(Type::of(x));

    std::size_t inconclusive = 0, exhaustive = 0, positive = 0;
    auto agree = [&](const Raw& a, const Raw& b) {
        bool fast = subtype(normalize_type(a), normalize_type(b));
        OracleAnswer o = subtype_oracle(a, b, kOracleDepth);
        if (o.result == OracleResult::DepthExceeded) ++inconclusive;
        positive += fast;
        bool ok = o.result != OracleResult::DepthExceeded && fast == (o.result == OracleResult::Proved);
        if (ok && o.proof) ok = check_subproof(o.proof);
        t.check(ok, [&] {
            return render(a) + " <= " + render(b) + ": subtype " + std::to_string(fast) + ", oracle " +
                   (o.result == OracleResult::Proved ? "proved" : o.result == OracleResult::Refuted ? "refuted" : "inconclusive");
        });
    };
    for (auto& p : pool)
        for (auto& a : p)
            for (auto& b : p) {
                ++exhaustive;
                agree(to_raw(a), to_raw(b));
                if (a.sort == Sort::S && subtype(a, b))
                    t.check(dom_contains(dom_sigma(a.s), dom_sigma(b.s)),
                            [&] { return "dom law fails for " + render(a) + " <= " + render(b); });
            }
    for (auto& p : pool)
        for (auto& a : p) t.check(subtype(a, a), [&] { return "not reflexive at " + render(a); });

    Rng rng(opt.seed);
    const Sort sorts[4] = {Sort::D, Sort::S, Sort::C, Sort::T};
    for (int i = 0; i < 5000; ++i) {
        TypeShape shape{4 + static_cast<std::size_t>(i % 3), {0, 1}};
        Sort s = sorts[i % 4];
        Raw a = random_type(rng, s, shape);
        Raw b = (i / 4) % 2 ? weaken(rng, a, shape) : random_type(rng, s, shape);
        agree(a, b);
        t.check(subtype(normalize_type(a), normalize_type(a)), [&] { return "not reflexive at " + render(a); });
        if (s == Sort::S) {
            Type ta = normalize_type(a), tb = normalize_type(b);
            if (subtype(ta, tb))
                t.check(dom_contains(dom_sigma(ta.s), dom_sigma(tb.s)),
                        [&] { return "dom law fails for " + render(a) + " <= " + render(b); });
        }
    }
    // transitivity: chains built by weakening, and random triples from the envelope
    std::size_t chains = 0;
    for (int i = 0; i < 5000; ++i) {
        TypeShape shape{4, {0, 1}};
        Sort s = sorts[i % 4];
        Raw a = random_type(rng, s, shape);
        Raw b = weaken(rng, a, shape), c = weaken(rng, b, shape);
        Type ta = normalize_type(a), tb = normalize_type(b), tc = normalize_type(c);
        if (subtype(ta, tb) && subtype(tb, tc)) {
            ++chains;
            t.check(subtype(ta, tc), [&] { return "transitivity fails: " + render(a) + ", " + render(b) + ", " + render(c); });
        }
    }
    for (int i = 0; i < 20000; ++i) {
        const auto& p = pool[3];
        const Type& a = p[rng() % p.size()];
        const Type& b = p[rng() % p.size()];
        const Type& c = p[rng() % p.size()];
        if (subtype(a, b) && subtype(b, c)) {
            ++chains;
            t.check(subtype(a, c), [&] { return "transitivity fails: " + render(a) + ", " + render(b) + ", " + render(c); });
        }
    }
    t.r.detail = "envelope D/S/C/T = " + std::to_string(pool[0].size()) + "/" + std::to_string(pool[1].size()) + "/" +
                 std::to_string(pool[2].size()) + "/" + std::to_string(pool[3].size()) + ", " +
                 std::to_string(exhaustive) + " exhaustive pairs + 5000 random, " + std::to_string(positive) +
                 " subtype-true, " + std::to_string(chains) + " transitive chains, " + std::to_string(inconclusive) +
                 " inconclusive";
    return t.r;
}

// ------------------------------------------------------------ corpora

constexpr std::size_t kFuel = 500;

// Converging closed terms; four in five take at least three steps.
std::vector<Comp> converging_corpus(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    TermShape shape{20, {0, 1}};
    std::vector<Comp> out;
    while (out.size() < n) out.push_back(random_converging(rng, shape, kFuel, out.size() % 5 ? 3 : 0));
    return out;
}

SuiteReport subject_reduction(const SuiteOptions& opt) {
    Tally t;
    std::size_t steps = 0, certified = 0;
    for (const auto& m : converging_corpus(opt.seed, 500)) {
        CertifyResult c = certify_convergence(m, kFuel);
        if (!c.ok) {
            t.check(false, [&] { return "no certificate for " + render(m); });
            continue;
        }
        ++certified;
        Deriv d = c.cert.config;
        const auto& tr = c.cert.trace;
        for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
            std::string err;
            Deriv next;
            try {
                next = preserve_step({}, d, tr[i], tr[i + 1]);
            } catch (const Error& e) {
                err = e.what();
            }
            bool ok = next != nullptr;
            if (ok) {
                CheckResult r = check_derivation({}, next);
                ok = r.ok && type_equiv(next->canon, d->canon);
                if (!r.ok) err = r.describe();
            }
            ++steps;
            t.check(ok, [&] { return "step " + std::to_string(i) + " of " + render(m) + ": " + err; });
            if (!ok) break;
            d = next;
        }
    }
    t.r.detail = std::to_string(certified) + " certificates, " + std::to_string(steps) + " steps replayed";
    return t.r;
}

SuiteReport characterization(const SuiteOptions& opt) {
    Tally t;
    std::size_t nodes = 0;
    for (const auto& m : converging_corpus(opt.seed ^ 0x5eedULL, 500)) {
        CertifyResult c = certify_convergence(m, kFuel);
        bool ok = c.ok;
        std::string why = ok ? "" : "no certificate";
        if (ok) {
            CheckResult r = check_derivation({}, c.cert.term);
            ok = r.ok && raw_equal(c.cert.term->type, convergence_type()) &&
                 c.cert.term->subject.kind == Subject::Kind::Comp && alpha_eq(c.cert.term->subject.comp, m);
            if (!r.ok) why = r.describe();
            nodes += deriv_size(c.cert.term);
        }
        t.check(ok, [&] { return render(m) + ": " + why; });
    }
    Budget b{50, kFuel, 8};
    for (const Comp& m : {omega_c(), parse_comp("get[l0](\\x. unit x)")}) {
        Deriv d = search_typing({}, m, convergence_type(), 6);
        t.check(d == nullptr, [&] { return "search typed " + render(m); });
        MembershipVerdict v = member(m, convergence_type(), b, opt.seed);
        t.check(v.verdict == Membership::No, [&] { return "membership of " + render(m) + " is not No"; });
    }
    t.r.detail = "500 certificates, " + std::to_string(nodes) + " derivation nodes; two negative exemplars";
    return t.r;
}

// ------------------------------------------------------------ criterion 6

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputInvalid("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(line);
    }
    return out;
}

SuiteReport golden(const SuiteOptions& opt) {
    Tally t;
    std::string dir = opt.golden_dir.empty() ? default_golden_dir() : opt.golden_dir;
    // Traces: the first line is the configuration, the rest the expected successors.
    for (const char* name : {"overriding.trace", "reduction.trace"}) {
        std::vector<std::string> ls = lines_of(read_file(dir + "/" + name));
        std::vector<Configuration> tr;
        RunOutcome o = run(parse_config(ls.at(0)), kFuel, &tr);
        bool ok = tr.size() == ls.size() && tr.size() == 4;
        for (std::size_t i = 0; ok && i < tr.size(); ++i) ok = render(tr[i]) == ls[i] && same_config(tr[i], parse_config(ls[i]));
        t.check(ok, [&] { return std::string(name) + ": trace differs (" + outcome_name(o.kind) + ")"; });
    }
    {
        // overriding: the final store equals the one with a single update
        Store a = parse_store("upd(l0, \\y. unit y, upd(l0, \\z. unit z >>= z, emp))");
        Store b = parse_store("upd(l0, \\y. unit y, emp)");
        t.check(store_eq(a, b), [] { return "overridden store differs from the single update"; });
    }
    for (const char* name : {"invariance.deriv", "set_get.deriv"}) {
        Judgment j = parse_derivation(read_file(dir + "/" + name));
        CheckResult r = check_derivation(j.context, j.root);
        t.check(r.ok, [&] { return std::string(name) + ": " + r.describe(); });
    }
    {
        Judgment j = parse_derivation(read_file(dir + "/set_get.deriv"));
        t.check(raw_equal(j.root->type, convergence_type()), [] { return "set_get.deriv is not at wS -> wD x wS"; });
    }
    Budget b{50, kFuel, 8};
    Raw dt = parse_type("wD -> wS -> wD x wS");
    MembershipVerdict yes = member(parse_value("\\x. unit x"), dt, b, opt.seed);
    t.check(yes.verdict == Membership::Yes, [] { return "identity is not in the interpretation"; });
    MembershipVerdict no = member(lam("x", omega_c()), dt, b, opt.seed);
    t.check(no.verdict == Membership::No, [] { return "\\x. Omega is in the interpretation"; });
    t.r.detail = "2 traces, 2 derivations, 2 memberships";
    return t.r;
}

// ------------------------------------------------------------ criterion 7

struct Instance {
    Context g;
    Deriv d;
};

void collect_instances(const Context& g, const Deriv& d, std::vector<Instance>& out) {
    if (d->subject.kind == Subject::Kind::Comp && d->rule != DRule::Omega) out.push_back({g, d});
    Context inner = g;
    if (d->rule == DRule::Lam) inner = ctx_extend(g, d->subject.value->name, d->type->a);
    if (d->rule == DRule::Get) {
        const Raw& dom = d->type->a;
        Raw rec = dom->kind == RawNode::Kind::Meet ? dom->a : dom;
        inner = ctx_extend(g, d->subject.comp->name, rec->a);
    }
    for (const auto& p : d->premises) collect_instances(inner, p, out);
}

SuiteReport complemma(const SuiteOptions& opt) {
    Tally t;
    std::vector<Instance> open, closed;
    for (const auto& m : converging_corpus(opt.seed ^ 0xc0ffeeULL, 60)) {
        CertifyResult c = certify_convergence(m, kFuel);
        if (!c.ok) continue;
        std::vector<Instance> xs;
        collect_instances({}, c.cert.term, xs);
        for (auto& x : xs) (free_vars(x.d->subject.comp).empty() ? closed : open).push_back(x);
    }
    Rng rng(opt.seed);
    std::vector<Instance> picked;
    for (int i = 0; i < 200; ++i) {
        auto& src = (i % 4 == 3 && !closed.empty()) || open.empty() ? closed : open;
        picked.push_back(src[rng() % src.size()]);
    }
    Budget b{50, kFuel, 8};
    std::size_t with_vars = 0;
    for (std::size_t i = 0; i < picked.size(); ++i) {
        const Instance& in = picked[i];
        if (!free_vars(in.d->subject.comp).empty()) ++with_vars;
        std::optional<Counterexample> cx;
        std::string err;
        try {
            cx = falsify_compLemma(in.g, in.d, b, opt.seed + i);
        } catch (const Error& e) {
            err = e.what();
        }
        t.check(!cx && err.empty(), [&] {
            return render(in.d->subject) + " : " + render(in.d->type) + (err.empty() ? ": counterexample" : ": " + err);
        });
    }
    t.r.detail = std::to_string(picked.size()) + " instances (" + std::to_string(with_vars) + " open), pool " +
                 std::to_string(open.size()) + " open / " + std::to_string(closed.size()) + " closed";
    return t.r;
}

// ------------------------------------------------------------ criterion 8

SuiteReport store_typing(const SuiteOptions& opt) {
    Tally t;
    std::vector<Store> all = enumerate_stores({0, 1}, store_values(), 6);
    std::vector<Raw> menu = {parse_type("wD"), parse_type("wD -> wS -> wD x wS"),
                             parse_type("(wD -> wS -> wD x wS) -> wS -> (wD -> wS -> wD x wS) x wS"),
                             parse_type("(wD -> wS -> wD x wS) /\\ ((wD -> wS -> wD x wS) -> wS -> wD x wS)")};
    auto searcher = [](Loc, const Value& v, const Raw& d) { return search_value({}, v, d, 6); };
    Rng rng(opt.seed);
    std::size_t pairs = 0, targets = 0, attempts = 0;
    while (pairs < 500 && attempts < 100000) {
        ++attempts;
        const Store& s = all[rng() % all.size()];
        std::vector<Raw> parts;
        for (Loc l : dom_store(s))
            if (rng() % 3) parts.push_back(r_rec(l, menu[rng() % menu.size()]));
        Raw sigma = r_meet_all(Sort::S, parts);
        Deriv ds = type_store_target(s, sigma, searcher);
        if (!ds || !check_derivation({}, ds).ok) continue;
        ++pairs;
        StoreTable table = store_table(ds);
        auto transfer = [&](Loc l, const Value& v, const Raw& d) {
            return coerce(align(table.at(l), Subject::of(v)), d);
        };
        for (const auto& u : all) {
            if (!store_eq(s, u)) continue;
            ++targets;
            std::string err;
            Deriv du;
            try {
                du = type_store_target(u, sigma, transfer);
            } catch (const Error& e) {
                err = e.what();
            }
            bool ok = du != nullptr;
            if (ok) {
                CheckResult r = check_derivation({}, du);
                ok = r.ok && raw_equal(du->type, sigma);
                if (!r.ok) err = r.describe();
            }
            t.check(ok, [&] { return render(u) + " : " + render(sigma) + " (from " + render(s) + ") " + err; });
        }
    }
    if (pairs < 500) t.check(false, [&] { return "only " + std::to_string(pairs) + " typable pairs found"; });
    t.r.detail = std::to_string(pairs) + " (s, sigma) pairs, " + std::to_string(targets) + " equal stores retyped";
    return t.r;
}

struct Entry {
    const char* name;
    int criterion;
    std::function<SuiteReport(const SuiteOptions&)> fn;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = {
        {"bigsmall", 1, bigsmall},
        {"stores", 2, stores},
        {"subtyping", 3, subtyping},
        {"subject-reduction", 4, subject_reduction},
        {"characterization", 5, characterization},
        {"golden", 6, golden},
        {"complemma", 7, complemma},
        {"store-typing", 8, store_typing},
    };
    return r;
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.push_back(e.name);
    return out;
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opt) {
    for (const auto& e : registry()) {
        if (name != e.name) continue;
        auto t0 = std::chrono::steady_clock::now();
        SuiteReport r;
        try {
            r = e.fn(opt);
        } catch (const std::exception& ex) {
            r.failures = r.failures + 1;
            r.examples.push_back(std::string("aborted: ") + ex.what());
        }
        r.name = e.name;
        r.criterion = e.criterion;
        r.pass = r.failures == 0;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
    throw InputInvalid("unknown suite " + name);
}

TypeEnvelope enumerate_types(unsigned depth, const std::vector<Loc>& locs) {
    TypeEnvelope e{{v_top()}, {s_top()}, {k_top()}, {c_top()}};
    for (unsigned k = 1; k <= depth; ++k) {
        std::map<std::string, VType> d{{v_top()->key, v_top()}};
        for (auto& a : e.d)
            for (auto& b : e.t) {
                VType x = v_arrow(a, b);
                d.emplace(x->key, x);
            }
        std::map<std::string, SType> s{{s_top()->key, s_top()}};
        for (auto& a : e.d)
            for (Loc l : locs) {
                SType x = s_rec(l, a);
                s.emplace(x->key, x);
            }
        std::map<std::string, KType> kk{{k_top()->key, k_top()}};
        for (auto& a : e.d)
            for (auto& b : e.s) {
                KType x = k_prod(a, b);
                kk.emplace(x->key, x);
            }
        std::map<std::string, CType> t{{c_top()->key, c_top()}};
        for (auto& a : e.s)
            for (auto& b : e.k) {
                CType x = c_arrow(a, b);
                t.emplace(x->key, x);
            }
        e = {meet_close(d, v_meet), meet_close(s, s_meet), meet_close(kk, k_meet), meet_close(t, c_meet)};
    }
    return e;
}

}  // namespace limp
