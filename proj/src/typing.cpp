#include "limp/typing.hpp"

#include <set>
#include <unordered_map>

#include "limp/errors.hpp"

namespace limp {

namespace {

using K = RawNode::Kind;
using SK = Subject::Kind;

[[noreturn]] void internal(const std::string& msg) { throw Error("internal: " + msg); }

Raw w(Sort s) { return r_omega(s); }

Subject part(const Subject& s, int which);

bool free_in(const std::string& x, const Subject& s);

}  // namespace

// ------------------------------------------------------------ basic nodes

Deriv d_omega(const Subject& s) { return make_deriv(DRule::Omega, s, w(subject_sort(s.kind))); }

Deriv d_meet_all(const Subject& s, const std::vector<Deriv>& ds) {
    std::vector<Deriv> uniq;
    std::set<std::string> seen;
    for (const auto& d : ds)
        if (!is_top(d->canon) && seen.insert(d->canon.key()).second) uniq.push_back(d);
    if (uniq.empty()) {
        if (!ds.empty()) return ds.front();
        return d_omega(s);
    }
    Deriv acc = uniq.back();
    for (std::size_t i = uniq.size() - 1; i-- > 0;)
        acc = make_deriv(DRule::Meet, s, r_meet(uniq[i]->type, acc->type), {uniq[i], acc});
    return acc;
}

Deriv coerce(const Deriv& d, const Raw& target) {
    if (raw_equal(d->type, target)) return d;
    Type t = normalize_type(target);
    if (!subtype(d->canon, t)) internal("coercion from " + raw_key(d->type) + " to " + raw_key(target) + " fails");
    if (d->rule == DRule::Sub) return make_deriv(DRule::Sub, d->subject, target, d->premises);
    return make_deriv(DRule::Sub, d->subject, target, {d});
}

Deriv d_conf(const Deriv& comp, const Deriv& store) {
    if (comp->type->kind != K::Arrow) internal("conf over a non-arrow computation typing");
    return make_deriv(DRule::Conf, Subject::of(Configuration{comp->subject.comp, store->subject.store}), comp->type->b,
                      {comp, store});
}

// ---------------------------------------------------------------- align

namespace {

Subject part(const Subject& s, int which) {
    switch (s.kind) {
    case SK::Value: return Subject::of(s.value->body);
    case SK::Comp: {
        const Comp& m = s.comp;
        switch (m->kind) {
        case CompNode::Kind::Unit: return Subject::of(m->val);
        case CompNode::Kind::Bind: return which == 0 ? Subject::of(m->comp) : Subject::of(m->val);
        case CompNode::Kind::Get: return Subject::of(m->comp);
        case CompNode::Kind::Set: return which == 0 ? Subject::of(m->val) : Subject::of(m->comp);
        }
        break;
    }
    case SK::Store: {
        const Store& st = s.store;
        if (which == 0 && st->entry) {
            return st->entry->kind == LookupNode::Kind::Val ? Subject::of(st->entry->val) : Subject::of(st->entry);
        }
        return Subject::of(st->rest);
    }
    case SK::Lookup: return Subject::of(s.lookup->store);
    case SK::Config: return which == 0 ? Subject::of(s.comp) : Subject::of(s.store);
    }
    internal("no such part");
}

// Premise i of a structural node corresponds to this part of the subject.
Subject premise_part(const Deriv& d, const Subject& target, std::size_t i) {
    switch (d->rule) {
    case DRule::Omega:
    case DRule::Meet:
    case DRule::Sub: return target;
    case DRule::UpdB: return part(target, 1);
    default: return part(target, static_cast<int>(i));
    }
}

bool identical(const Subject& a, const Subject& b) {
    return a.kind == b.kind && a.value == b.value && a.comp == b.comp && a.store == b.store && a.lookup == b.lookup;
}

bool shape_fits(DRule r, const Subject& t) {
    switch (r) {
    case DRule::Omega:
    case DRule::Meet:
    case DRule::Sub: return true;
    case DRule::Var: return t.kind == SK::Value && t.value->kind == ValueNode::Kind::Var;
    case DRule::Lam: return t.kind == SK::Value && t.value->kind == ValueNode::Kind::Lam;
    case DRule::Unit: return t.kind == SK::Comp && t.comp->kind == CompNode::Kind::Unit;
    case DRule::Bind: return t.kind == SK::Comp && t.comp->kind == CompNode::Kind::Bind;
    case DRule::Get: return t.kind == SK::Comp && t.comp->kind == CompNode::Kind::Get;
    case DRule::Set: return t.kind == SK::Comp && t.comp->kind == CompNode::Kind::Set;
    case DRule::UpdA:
    case DRule::UpdB: return t.kind == SK::Store && t.store->kind == StoreNode::Kind::Upd;
    case DRule::Lkp: return t.kind == SK::Lookup && t.lookup->kind == LookupNode::Kind::Lkp;
    case DRule::Conf: return t.kind == SK::Config;
    }
    return false;
}

struct Aligner {
    std::unordered_map<const DerivNode*, std::vector<std::pair<Subject, Deriv>>> memo;

    Deriv run(const Deriv& d, const Subject& target) {
        if (identical(d->subject, target)) return d;
        if (!shape_fits(d->rule, target)) internal(std::string("cannot align a ") + rule_name(d->rule) + " node");
        auto& slot = memo[d.get()];
        for (const auto& [t, r] : slot)
            if (identical(t, target)) return r;
        std::vector<Deriv> ps;
        ps.reserve(d->premises.size());
        for (std::size_t i = 0; i < d->premises.size(); ++i) ps.push_back(run(d->premises[i], premise_part(d, target, i)));
        Deriv out = std::make_shared<const DerivNode>(DerivNode{d->rule, target, d->type, d->canon, std::move(ps)});
        memo[d.get()].emplace_back(target, out);
        return out;
    }
};

}  // namespace

Deriv align(const Deriv& d, const Subject& target) { return Aligner{}.run(d, target); }

// ------------------------------------------------------------- frontier

namespace {
void collect_frontier(const Deriv& d, std::vector<Deriv>& out, std::set<const DerivNode*>& seen) {
    switch (d->rule) {
    case DRule::Omega: return;
    case DRule::Meet:
    case DRule::Sub:
        for (const auto& p : d->premises) collect_frontier(p, out, seen);
        return;
    default:
        if (seen.insert(d.get()).second) out.push_back(d);
    }
}
}  // namespace

std::vector<Deriv> frontier(const Deriv& d) {
    std::vector<Deriv> out;
    std::set<const DerivNode*> seen;
    collect_frontier(d, out, seen);
    return out;
}

ConfParts conf_normal(const Deriv& d) {
    if (d->subject.kind != SK::Config) internal("conf_normal on a non-configuration");
    Subject m = Subject::of(d->subject.comp), s = Subject::of(d->subject.store);
    std::vector<Deriv> fr;
    std::set<std::string> seen;
    for (const auto& n : frontier(d)) {
        std::string key = n->premises[0]->canon.key() + "|" + n->premises[1]->canon.key();
        if (seen.insert(key).second) fr.push_back(n);
    }
    if (fr.empty()) {
        Raw sigma = w(Sort::S);
        return {sigma, make_deriv(DRule::Omega, m, r_arrow(sigma, d->type)), d_omega(s)};
    }
    std::vector<Deriv> stores;
    for (const auto& n : fr) stores.push_back(align(n->premises[1], s));
    Deriv ds = d_meet_all(s, stores);
    Raw sigma = ds->type;
    std::vector<Deriv> comps;
    for (const auto& n : fr) {
        const Deriv& p = n->premises[0];
        comps.push_back(coerce(align(p, m), r_arrow(sigma, p->type->b)));
    }
    Deriv dm = coerce(d_meet_all(m, comps), r_arrow(sigma, d->type));
    return {sigma, dm, ds};
}

// ---------------------------------------------------------------- stores

namespace {

Deriv lookup_value(const Deriv& du);

void merge_into(StoreTable& into, const StoreTable& from) {
    for (const auto& [l, d] : from) {
        auto it = into.find(l);
        if (it == into.end()) {
            into.emplace(l, d);
        } else {
            it->second = d_meet_all(it->second->subject, {it->second, align(d, it->second->subject)});
        }
    }
}

StoreTable table_of(const Deriv& d) {
    switch (d->rule) {
    case DRule::Omega: return {};
    case DRule::Sub: return table_of(d->premises[0]);
    case DRule::Meet: {
        StoreTable t = table_of(d->premises[0]);
        merge_into(t, table_of(d->premises[1]));
        return t;
    }
    case DRule::UpdA: {
        const Deriv& p = d->premises[0];
        Deriv v = p->subject.kind == SK::Lookup ? lookup_value(p) : p;
        return {{d->type->loc, v}};
    }
    case DRule::UpdB: {
        StoreTable t = table_of(d->premises[0]);
        auto it = t.find(d->type->loc);
        if (it == t.end()) internal("store table lost an entry");
        return {{it->first, it->second}};
    }
    default: internal(std::string("store table through a ") + rule_name(d->rule) + " node");
    }
}

// From lkp_l(s) : d, a typing of the value the lookup denotes.
Deriv lookup_value(const Deriv& du) {
    const Lookup& u = du->subject.lookup;
    Value v = resolve(u);
    std::vector<Deriv> parts;
    for (const auto& n : frontier(du)) {
        StoreTable t = table_of(n->premises[0]);
        auto it = t.find(u->loc);
        if (it == t.end()) internal("lookup typing without an entry");
        parts.push_back(align(it->second, Subject::of(v)));
    }
    Deriv m = d_meet_all(Subject::of(v), parts);
    return coerce(m, du->type);
}

}  // namespace

StoreTable store_table(const Deriv& store_deriv) { return table_of(store_deriv); }

Deriv type_store_at(const Store& s, Loc l, const Deriv& dv) {
    if (s->kind == StoreNode::Kind::Emp) throw UndefinedLocation(l);
    Raw rec = r_rec(l, dv->type);
    if (s->loc != l) return make_deriv(DRule::UpdB, Subject::of(s), rec, {type_store_at(s->rest, l, dv)});
    const Lookup& u = s->entry;
    Deriv p;
    if (u->kind == LookupNode::Kind::Val) {
        p = align(dv, Subject::of(u->val));
    } else {
        p = make_deriv(DRule::Lkp, Subject::of(u), dv->type, {type_store_at(u->store, u->loc, dv)});
    }
    return make_deriv(DRule::UpdA, Subject::of(s), rec, {p});
}

Deriv type_store_target(const Store& s, const Raw& sigma, const ValueTyper& typer) {
    Type st = normalize_type(sigma);
    if (st.sort != Sort::S) throw SortMismatch("store typing needs a store type");
    std::vector<Deriv> parts;
    for (const auto& [l, d] : st.s->entries) {
        if (!in_dom(l, s)) return nullptr;
        Value v = resolve_lookup(l, s);
        Deriv dv = typer(l, v, to_raw(d));
        if (!dv) return nullptr;
        parts.push_back(type_store_at(s, l, dv));
    }
    return coerce(d_meet_all(Subject::of(s), parts), sigma);
}

Deriv type_store(const Store& s) {
    std::vector<Deriv> parts;
    for (Loc l : dom_store(s)) parts.push_back(type_store_at(s, l, d_omega(Subject::of(resolve_lookup(l, s)))));
    return d_meet_all(Subject::of(s), parts);
}

// ------------------------------------------------------------ substitution

namespace {

bool free_in_store(const std::string& x, const Store& s);

bool free_in_lookup(const std::string& x, const Lookup& u) {
    return u->kind == LookupNode::Kind::Val ? is_free(x, u->val) : free_in_store(x, u->store);
}

bool free_in_store(const std::string& x, const Store& s) {
    for (const StoreNode* p = s.get(); p->kind == StoreNode::Kind::Upd; p = p->rest.get())
        if (free_in_lookup(x, p->entry)) return true;
    return false;
}

bool free_in(const std::string& x, const Subject& s) {
    switch (s.kind) {
    case SK::Value: return is_free(x, s.value);
    case SK::Comp: return is_free(x, s.comp);
    case SK::Store: return free_in_store(x, s.store);
    case SK::Lookup: return free_in_lookup(x, s.lookup);
    case SK::Config: return is_free(x, s.comp) || free_in_store(x, s.store);
    }
    return false;
}

Subject subst_subject(const Subject& s, const std::string& x, const Value& v) {
    switch (s.kind) {
    case SK::Value: return Subject::of(substitute(s.value, x, v));
    case SK::Comp: return Subject::of(substitute(s.comp, x, v));
    case SK::Store: return Subject::of(substitute(s.store, x, v));
    case SK::Lookup: return Subject::of(substitute(s.lookup, x, v));
    case SK::Config: return Subject::of(Configuration{substitute(s.comp, x, v), substitute(s.store, x, v)});
    }
    return s;
}

// Replaces the (var) nodes for x by dv; subjects are fixed afterwards.
Deriv subst_walk(const Deriv& d, const std::string& x, const Deriv& dv) {
    if (!free_in(x, d->subject)) return d;
    if (d->rule == DRule::Var) return d->subject.value->name == x ? coerce(dv, d->type) : d;
    if (d->rule == DRule::Lam && d->subject.value->name == x) return d;
    if (d->rule == DRule::Get && d->subject.comp->name == x) return d;
    std::vector<Deriv> ps;
    ps.reserve(d->premises.size());
    for (const auto& p : d->premises) ps.push_back(subst_walk(p, x, dv));
    return std::make_shared<const DerivNode>(DerivNode{d->rule, d->subject, d->type, d->canon, std::move(ps)});
}

Deriv subst_unchecked(const Deriv& dm, const std::string& x, const Deriv& dv) {
    Deriv walked = subst_walk(dm, x, dv);
    return align(walked, subst_subject(dm->subject, x, dv->subject.value));
}

void require_ok(const Context& g, const Deriv& d, const char* what) {
    CheckResult r = check_derivation(g, d);
    if (!r.ok) throw InputInvalid(std::string(what) + " does not check: " + r.describe());
}

}  // namespace

Deriv subst_derivation(const Context& g, const std::string& x, const Deriv& dm, const Deriv& dv) {
    if (dv->subject.kind != SK::Value) throw InputInvalid("substituted derivation must type a value");
    require_ok(g, dv, "value derivation");
    require_ok(ctx_extend(g, x, dv->type), dm, "derivation");
    return subst_unchecked(dm, x, dv);
}

// --------------------------------------------------------------- expansion

namespace {

struct Expander {
    std::string x;
    Value v;
    std::vector<Deriv> occurrences;
    Raw delta;

    void collect(const Deriv& d, const Subject& term) {
        if (!free_in(x, term)) return;
        if (term.kind == SK::Value && term.value->kind == ValueNode::Kind::Var) {
            occurrences.push_back(d);
            return;
        }
        if (!shape_fits(d->rule, term)) throw DecompositionMismatch("derivation does not follow the decomposition");
        for (std::size_t i = 0; i < d->premises.size(); ++i) collect(d->premises[i], premise_part(d, term, i));
    }

    Deriv rebuild(const Deriv& d, const Subject& term) {
        if (!free_in(x, term)) return align(d, term);
        if (term.kind == SK::Value && term.value->kind == ValueNode::Kind::Var)
            return coerce(make_deriv(DRule::Var, term, delta), d->type);
        std::vector<Deriv> ps;
        for (std::size_t i = 0; i < d->premises.size(); ++i) ps.push_back(rebuild(d->premises[i], premise_part(d, term, i)));
        return std::make_shared<const DerivNode>(DerivNode{d->rule, term, d->type, d->canon, std::move(ps)});
    }
};

Expansion expand_unchecked(const Deriv& d, const Comp& m, const std::string& x, const Value& v) {
    Expander e{x, v, {}, nullptr};
    Subject term = Subject::of(m);
    e.collect(d, term);
    std::vector<Deriv> occ;
    for (const auto& o : e.occurrences) occ.push_back(align(o, Subject::of(v)));
    Deriv dv = d_meet_all(Subject::of(v), occ);
    e.delta = dv->type;
    return {e.delta, dv, e.rebuild(d, term)};
}

}  // namespace

Expansion expand_derivation(const Context& g, const Deriv& d, const Comp& m, const std::string& x, const Value& v) {
    if (d->subject.kind != SK::Comp || !alpha_eq(d->subject.comp, substitute(m, x, v)))
        throw DecompositionMismatch("derivation subject is not the given substitution instance");
    require_ok(g, d, "derivation");
    return expand_unchecked(d, m, x, v);
}

// ------------------------------------------------------------ reduction

namespace {

Deriv omega_at(const Subject& s, const Raw& t) { return make_deriv(DRule::Omega, s, t); }

Deriv preserve(const Deriv& d, const Configuration& from, const Configuration& to);
Deriv expand(const Deriv& d, const Configuration& from, const Configuration& to);

// A product raw type equivalent to k (k must not be top).
Raw as_product(const Deriv& d) {
    if (d->type->kind == K::Prod) return d->type;
    return to_raw(d->canon);
}

Deriv preserve(const Deriv& d, const Configuration& from, const Configuration& to) {
    Subject target = Subject::of(to);
    if (is_top(d->canon)) return omega_at(target, d->type);
    ConfParts cp = conf_normal(d);
    Type sigma = normalize_type(cp.sigma);
    std::optional<StepRule> rule = redex_rule(from);
    if (!rule) throw NotAStep("configuration does not reduce");
    StoreTable table;
    if (*rule == StepRule::Get || *rule == StepRule::Set) table = store_table(cp.store);

    std::vector<Deriv> results;
    for (const auto& n : frontier(cp.comp)) {
        Raw sj = n->type->a, kj = n->type->b;
        if (!subtype(sigma, normalize_type(sj))) continue;
        Deriv dsj = coerce(cp.store, sj);
        switch (*rule) {
        case StepRule::Beta: {
            const Deriv& pu = n->premises[0];
            const Deriv& pl = n->premises[1];
            Raw dprime = pu->type->b->a, sprime = pu->type->b->b;
            Type sj_t = normalize_type(sj);
            std::vector<Deriv> vals, sts;
            const Value& v = from.comp->comp->val;
            for (const auto& u : frontier(pu)) {
                if (!subtype(sj_t, normalize_type(u->type->a))) continue;
                vals.push_back(align(u->premises[0], Subject::of(v)));
                sts.push_back(coerce(dsj, u->type->a));
            }
            Deriv dv = coerce(d_meet_all(Subject::of(v), vals), dprime);
            Deriv ds = coerce(d_meet_all(Subject::of(from.store), sts), sprime);
            Type dp = normalize_type(dprime);
            std::vector<Deriv> bodies;
            for (const auto& l : frontier(pl)) {
                if (!subtype(dp, normalize_type(l->type->a))) continue;
                bodies.push_back(align(subst_unchecked(l->premises[0], l->subject.value->name, coerce(dv, l->type->a)),
                                       Subject::of(to.comp)));
            }
            Deriv body = coerce(d_meet_all(Subject::of(to.comp), bodies), r_arrow(sprime, kj));
            results.push_back(d_conf(body, align(ds, Subject::of(to.store))));
            break;
        }
        case StepRule::BindContext: {
            const Comp& m1 = from.comp->comp;
            const Comp& m1p = to.comp->comp;
            Deriv inner = d_conf(align(n->premises[0], Subject::of(m1)), dsj);
            Deriv moved = preserve(inner, {m1, from.store}, {m1p, to.store});
            ConfParts cp2 = conf_normal(moved);
            Deriv b = make_deriv(DRule::Bind, Subject::of(to.comp), r_arrow(cp2.sigma, kj),
                                 {cp2.comp, align(n->premises[1], Subject::of(to.comp->val))});
            results.push_back(d_conf(b, cp2.store));
            break;
        }
        case StepRule::Get: {
            Loc l = from.comp->loc;
            const Raw& dom = n->type->a;
            Raw rec = dom->kind == K::Meet ? dom->a : dom;
            auto it = table.find(l);
            if (it == table.end()) internal("get without a store entry");
            Value v = resolve_lookup(l, from.store);
            Deriv dv = coerce(align(it->second, Subject::of(v)), rec->a);
            Deriv body = subst_unchecked(n->premises[0], n->subject.comp->name, dv);
            body = coerce(align(body, Subject::of(to.comp)), r_arrow(sj, kj));
            results.push_back(d_conf(body, dsj));
            break;
        }
        case StepRule::Set: {
            Loc l = from.comp->loc;
            const Deriv& pw = n->premises[0];
            const Deriv& pm = n->premises[1];
            std::vector<Deriv> parts{make_deriv(DRule::UpdA, Subject::of(to.store), r_rec(l, pw->type),
                                                {align(pw, Subject::of(to.store->entry->val))})};
            for (const auto& [l2, _] : normalize_type(sj).s->entries) {
                auto it = table.find(l2);
                if (it == table.end()) internal("set without a store entry");
                parts.push_back(type_store_at(to.store, l2, it->second));
            }
            Deriv st = coerce(d_meet_all(Subject::of(to.store), parts), pm->type->a);
            results.push_back(d_conf(align(pm, Subject::of(to.comp)), st));
            break;
        }
        }
    }
    if (results.empty()) internal("no frontier node applies");
    return coerce(d_meet_all(target, results), d->type);
}

Deriv expand(const Deriv& d, const Configuration& from, const Configuration& to) {
    Subject source = Subject::of(from);
    if (is_top(d->canon)) return omega_at(source, d->type);
    std::optional<StepRule> rule = redex_rule(from);
    if (!rule) throw NotAStep("configuration does not reduce");
    ConfParts cp = conf_normal(d);
    const Comp& m = from.comp;

    switch (*rule) {
    case StepRule::Beta: {
        Raw kp = as_product(d);
        Deriv dn = coerce(cp.comp, r_arrow(cp.sigma, kp));
        const Value& fn = m->val;
        const Value& v = m->comp->val;
        Expansion ex = expand_unchecked(dn, fn->body, fn->name, v);
        Deriv lamd = make_deriv(DRule::Lam, Subject::of(fn), r_arrow(ex.delta, dn->type), {ex.comp});
        Deriv unitd =
            make_deriv(DRule::Unit, Subject::of(m->comp), r_arrow(cp.sigma, r_prod(ex.delta, cp.sigma)), {ex.value});
        Deriv b = make_deriv(DRule::Bind, Subject::of(m), r_arrow(cp.sigma, kp), {unitd, lamd});
        return coerce(d_conf(b, align(cp.store, Subject::of(from.store))), d->type);
    }
    case StepRule::BindContext: {
        Type sigma = normalize_type(cp.sigma);
        const Comp& m1 = m->comp;
        const Comp& m1p = to.comp->comp;
        std::vector<Deriv> results;
        for (const auto& n : frontier(cp.comp)) {
            Raw sj = n->type->a, kj = n->type->b;
            if (!subtype(sigma, normalize_type(sj))) continue;
            Deriv inner = d_conf(align(n->premises[0], Subject::of(m1p)), coerce(cp.store, sj));
            Deriv back = expand(inner, {m1, from.store}, {m1p, to.store});
            ConfParts cp2 = conf_normal(back);
            Deriv b = make_deriv(DRule::Bind, Subject::of(m), r_arrow(cp2.sigma, kj),
                                 {cp2.comp, align(n->premises[1], Subject::of(m->val))});
            results.push_back(d_conf(b, cp2.store));
        }
        if (results.empty()) internal("no frontier node applies");
        return coerce(d_meet_all(source, results), d->type);
    }
    case StepRule::Get: {
        Loc l = m->loc;
        Value v = resolve_lookup(l, from.store);
        Expansion ex = expand_unchecked(cp.comp, m->comp, m->name, v);
        Raw kappa = cp.comp->type->b;
        Raw dom = r_meet(r_rec(l, ex.delta), cp.sigma);
        Deriv g = make_deriv(DRule::Get, Subject::of(m), r_arrow(dom, kappa), {ex.comp});
        Subject st = Subject::of(from.store);
        Deriv ds = make_deriv(DRule::Meet, st, dom, {type_store_at(from.store, l, ex.value), align(cp.store, st)});
        return coerce(d_conf(g, ds), d->type);
    }
    case StepRule::Set: {
        Loc l = m->loc;
        Type sigma = normalize_type(cp.sigma);
        StoreTable table = store_table(cp.store);
        bool has = sigma.s->entries.count(l) > 0;
        Deriv dw;
        if (has) {
            auto it = table.find(l);
            if (it == table.end()) internal("set expansion without an entry");
            dw = align(it->second, Subject::of(m->val));
        } else {
            dw = d_omega(Subject::of(m->val));
        }
        SType rest = s_without(sigma.s, l);
        Raw rest_raw = to_raw(rest);
        Raw kappa = cp.comp->type->b;
        Deriv pm = coerce(align(cp.comp, Subject::of(m->comp)), r_arrow(r_meet(r_rec(l, dw->type), rest_raw), kappa));
        Deriv sd = make_deriv(DRule::Set, Subject::of(m), r_arrow(rest_raw, kappa), {dw, pm});
        std::vector<Deriv> parts;
        for (const auto& [l2, _] : rest->entries) {
            auto it = table.find(l2);
            if (it == table.end()) internal("set expansion without an entry");
            parts.push_back(type_store_at(from.store, l2, it->second));
        }
        Deriv ds = coerce(d_meet_all(Subject::of(from.store), parts), rest_raw);
        return coerce(d_conf(sd, ds), d->type);
    }
    }
    internal("unreachable");
}

void require_step(const Configuration& from, const Configuration& to) {
    StepOutcome o = step(from);
    if (o.kind != StepOutcome::Kind::Next || !same_config(o.config, to))
        throw NotAStep("the given configurations are not a reduction step");
}

}  // namespace

Deriv preserve_step(const Context& g, const Deriv& d, const Configuration& from, const Configuration& to) {
    require_step(from, to);
    require_ok(g, d, "derivation");
    if (d->subject.kind != SK::Config || !same_config({d->subject.comp, d->subject.store}, from))
        throw InputInvalid("derivation does not type the source configuration");
    return preserve(align(d, Subject::of(from)), from, to);
}

Deriv expand_step(const Context& g, const Deriv& d, const Configuration& from, const Configuration& to) {
    require_step(from, to);
    require_ok(g, d, "derivation");
    if (d->subject.kind != SK::Config || !same_config({d->subject.comp, d->subject.store}, to))
        throw InputInvalid("derivation does not type the target configuration");
    return expand(align(d, Subject::of(to)), from, to);
}

Raw convergence_type() { return r_arrow(r_omega(Sort::S), r_prod(r_omega(Sort::D), r_omega(Sort::S))); }

CertifyResult certify_convergence(const Comp& m, std::size_t fuel) {
    CertifyResult res;
    std::vector<Configuration> trace;
    res.outcome = run({m, emp()}, fuel, &trace);
    if (res.outcome.kind != RunOutcome::Kind::Converged) return res;
    const Configuration& last = trace.back();
    Deriv unitd = make_deriv(DRule::Unit, Subject::of(last.comp), convergence_type(),
                             {d_omega(Subject::of(last.comp->val))});
    Deriv d = d_conf(unitd, d_omega(Subject::of(last.store)));
    for (std::size_t i = trace.size() - 1; i-- > 0;) d = expand(d, trace[i], trace[i + 1]);
    ConfParts cp = conf_normal(d);
    if (!is_top(normalize_type(cp.sigma))) internal("empty store typed below wS");
    res.ok = true;
    res.cert.trace = std::move(trace);
    res.cert.config = d;
    res.cert.term = coerce(cp.comp, convergence_type());
    return res;
}

// ------------------------------------------------------------------ search

namespace {

struct Searcher {
    std::vector<Deriv> forward(const Context& g, const Comp& m, const Raw& sigma, unsigned depth);
    std::vector<Deriv> apply(const Context& g, const Value& v, const Raw& d, const Raw& s, unsigned depth);
    std::vector<Deriv> value_menu(const Context& g, const Value& v, unsigned depth);
    Deriv check_value(const Context& g, const Value& v, const Type& delta, unsigned depth);
    Deriv check_comp(const Context& g, const Comp& m, const Raw& sigma, const KType& k, unsigned depth);
    Deriv check_tau(const Context& g, const Comp& m, const CType& t, unsigned depth);
};

Deriv Searcher::check_tau(const Context& g, const Comp& m, const CType& t, unsigned depth) {
    std::vector<Deriv> parts;
    for (const auto& [s, k] : t->arrows) {
        Deriv d = check_comp(g, m, to_raw(s), k, depth);
        if (!d) return nullptr;
        parts.push_back(coerce(d, r_arrow(to_raw(s), to_raw(k))));
    }
    return d_meet_all(Subject::of(m), parts);
}

Deriv Searcher::check_value(const Context& g, const Value& v, const Type& delta, unsigned depth) {
    Subject sv = Subject::of(v);
    if (is_top(delta)) return d_omega(sv);
    Raw target = to_raw(delta);
    if (v->kind == ValueNode::Kind::Var) {
        auto it = g.find(v->name);
        if (it == g.end() || !sub_v(it->second.canon, delta.d)) return nullptr;
        return coerce(make_deriv(DRule::Var, sv, it->second.raw), target);
    }
    if (depth == 0) return nullptr;
    std::vector<Deriv> parts;
    for (const auto& [d, t] : delta.d->arrows) {
        Raw dr = to_raw(d);
        Deriv body = check_tau(ctx_extend(g, v->name, dr), v->body, t, depth - 1);
        if (!body) return nullptr;
        parts.push_back(make_deriv(DRule::Lam, sv, r_arrow(dr, body->type), {body}));
    }
    return coerce(d_meet_all(sv, parts), target);
}

Deriv Searcher::check_comp(const Context& g, const Comp& m, const Raw& sigma, const KType& k, unsigned depth) {
    Subject sm = Subject::of(m);
    Raw goal = r_arrow(sigma, to_raw(k));
    if (k->top) return make_deriv(DRule::Omega, sm, goal);
    if (depth == 0) return nullptr;
    Type st = normalize_type(sigma);
    switch (m->kind) {
    case CompNode::Kind::Unit: {
        if (!sub_s(st.s, k->s)) return nullptr;
        Deriv dv = check_value(g, m->val, Type::of(k->d), depth - 1);
        if (!dv) return nullptr;
        Deriv u = make_deriv(DRule::Unit, sm, r_arrow(sigma, r_prod(dv->type, sigma)), {dv});
        return coerce(u, goal);
    }
    case CompNode::Kind::Get: {
        auto it = st.s->entries.find(m->loc);
        if (it == st.s->entries.end()) return nullptr;
        Raw dr = to_raw(it->second);
        Deriv body = check_comp(ctx_extend(g, m->name, dr), m->comp, sigma, k, depth - 1);
        if (!body) return nullptr;
        Deriv gd = make_deriv(DRule::Get, sm, r_arrow(r_meet(r_rec(m->loc, dr), sigma), body->type->b), {body});
        return coerce(gd, goal);
    }
    case CompNode::Kind::Set: {
        Raw rest = to_raw(s_without(st.s, m->loc));
        for (const auto& dw : value_menu(g, m->val, depth - 1)) {
            Raw dom = r_meet(r_rec(m->loc, dw->type), rest);
            Deriv body = check_comp(g, m->comp, dom, k, depth - 1);
            if (!body) continue;
            Deriv sd = make_deriv(DRule::Set, sm, r_arrow(rest, body->type->b), {dw, coerce(body, r_arrow(dom, body->type->b))});
            return coerce(sd, goal);
        }
        return nullptr;
    }
    case CompNode::Kind::Bind: {
        for (const auto& left : forward(g, m->comp, sigma, depth - 1)) {
            const Raw& prod = left->type->b;
            Type want = normalize_type(r_arrow(prod->a, r_arrow(prod->b, to_raw(k))));
            Deriv fn = check_value(g, m->val, want, depth - 1);
            if (!fn) continue;
            Raw fn_raw = r_arrow(prod->a, r_arrow(prod->b, to_raw(k)));
            Deriv b = make_deriv(DRule::Bind, sm, r_arrow(sigma, to_raw(k)), {left, coerce(fn, fn_raw)});
            return coerce(b, goal);
        }
        return nullptr;
    }
    }
    return nullptr;
}

std::vector<Deriv> Searcher::value_menu(const Context& g, const Value& v, unsigned depth) {
    Subject sv = Subject::of(v);
    std::vector<Deriv> out;
    if (v->kind == ValueNode::Kind::Var) {
        auto it = g.find(v->name);
        if (it != g.end()) out.push_back(make_deriv(DRule::Var, sv, it->second.raw));
    } else if (depth > 0) {
        for (const auto& body : forward(ctx_extend(g, v->name, w(Sort::D)), v->body, w(Sort::S), depth - 1))
            out.push_back(make_deriv(DRule::Lam, sv, r_arrow(w(Sort::D), body->type), {body}));
    }
    out.push_back(d_omega(sv));
    return out;
}

std::vector<Deriv> Searcher::apply(const Context& g, const Value& v, const Raw& d, const Raw& s, unsigned depth) {
    Subject sv = Subject::of(v);
    std::vector<Deriv> out;
    Type dt = normalize_type(d), stt = normalize_type(s);
    if (v->kind == ValueNode::Kind::Var) {
        auto it = g.find(v->name);
        if (it == g.end()) return out;
        Deriv var = make_deriv(DRule::Var, sv, it->second.raw);
        for (const auto& [d1, t1] : it->second.canon->arrows) {
            if (!sub_v(dt.d, d1)) continue;
            for (const auto& [s1, k1] : t1->arrows)
                if (sub_s(stt.s, s1)) out.push_back(coerce(var, r_arrow(d, r_arrow(s, to_raw(k1)))));
        }
        return out;
    }
    if (depth == 0) return out;
    for (const auto& body : forward(ctx_extend(g, v->name, d), v->body, s, depth - 1))
        out.push_back(make_deriv(DRule::Lam, sv, r_arrow(d, body->type), {body}));
    return out;
}

std::vector<Deriv> Searcher::forward(const Context& g, const Comp& m, const Raw& sigma, unsigned depth) {
    Subject sm = Subject::of(m);
    std::vector<Deriv> out;
    if (depth == 0) return out;
    Type st = normalize_type(sigma);
    switch (m->kind) {
    case CompNode::Kind::Unit:
        for (const auto& dv : value_menu(g, m->val, depth - 1))
            out.push_back(make_deriv(DRule::Unit, sm, r_arrow(sigma, r_prod(dv->type, sigma)), {dv}));
        break;
    case CompNode::Kind::Get: {
        auto it = st.s->entries.find(m->loc);
        if (it == st.s->entries.end()) break;
        Raw dr = to_raw(it->second);
        for (const auto& body : forward(ctx_extend(g, m->name, dr), m->comp, sigma, depth - 1)) {
            Deriv gd = make_deriv(DRule::Get, sm, r_arrow(r_meet(r_rec(m->loc, dr), sigma), body->type->b), {body});
            out.push_back(coerce(gd, r_arrow(sigma, body->type->b)));
        }
        break;
    }
    case CompNode::Kind::Set: {
        Raw rest = to_raw(s_without(st.s, m->loc));
        for (const auto& dw : value_menu(g, m->val, depth - 1)) {
            Raw dom = r_meet(r_rec(m->loc, dw->type), rest);
            for (const auto& body : forward(g, m->comp, dom, depth - 1)) {
                Deriv sd = make_deriv(DRule::Set, sm, r_arrow(rest, body->type->b), {dw, body});
                out.push_back(coerce(sd, r_arrow(sigma, body->type->b)));
            }
        }
        break;
    }
    case CompNode::Kind::Bind:
        for (const auto& left : forward(g, m->comp, sigma, depth - 1)) {
            const Raw& prod = left->type->b;
            for (const auto& fn : apply(g, m->val, prod->a, prod->b, depth - 1)) {
                Raw k = fn->type->b->b;
                if (k->kind != K::Prod) continue;
                out.push_back(make_deriv(DRule::Bind, sm, r_arrow(sigma, k), {left, fn}));
            }
        }
        break;
    }
    return out;
}

}  // namespace

Deriv search_typing(const Context& g, const Comp& m, const Raw& tau, unsigned depth) {
    Type t = normalize_type(tau);
    if (t.sort != Sort::T) throw SortMismatch("search needs a computation type");
    Deriv d = Searcher{}.check_tau(g, m, t.t, depth);
    if (!d) return nullptr;
    d = coerce(d, tau);
    CheckResult r = check_derivation(g, d);
    if (!r.ok) internal("search produced an invalid derivation: " + r.describe());
    return d;
}

Deriv search_value(const Context& g, const Value& v, const Raw& delta, unsigned depth) {
    Type t = normalize_type(delta);
    if (t.sort != Sort::D) throw SortMismatch("value search needs a value type");
    Deriv d = Searcher{}.check_value(g, v, t, depth);
    if (!d) return nullptr;
    d = coerce(d, delta);
    CheckResult r = check_derivation(g, d);
    if (!r.ok) internal("search produced an invalid derivation: " + r.describe());
    return d;
}

}  // namespace limp
