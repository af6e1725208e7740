#include "limp/subtype_oracle.hpp"

#include <algorithm>

namespace limp {

using Rule = SubProof::Rule;
using K = RawNode::Kind;

const char* subproof_rule_name(Rule r) {
    switch (r) {
    case Rule::Refl: return "refl";
    case Rule::Trans: return "trans";
    case Rule::Top: return "top";
    case Rule::MeetL: return "meet-l";
    case Rule::MeetR: return "meet-r";
    case Rule::Glb: return "glb";
    case Rule::Ax1: return "ax1";
    case Rule::Ax2: return "ax2";
    case Rule::Ax3: return "ax3";
    case Rule::Ax5: return "ax5";
    case Rule::Ax6: return "ax6";
    case Rule::Ax7: return "ax7";
    case Rule::Arrow: return "arrow";
    case Rule::Rec: return "rec";
    case Rule::Prod: return "prod";
    }
    return "?";
}

namespace {

bool is_omega(const Raw& t, Sort s) { return t->kind == K::Omega && t->sort == s; }

bool premise_is(const SubProofPtr& p, const Raw& l, const Raw& r) {
    return raw_equal(p->lhs, l) && raw_equal(p->rhs, r);
}

bool local_ok(const SubProof& p) {
    const Raw& a = p.lhs;
    const Raw& b = p.rhs;
    if (a->sort != b->sort) return false;
    const auto& ps = p.premises;
    auto arity = [&](std::size_t n) { return ps.size() == n; };
    switch (p.rule) {
    case Rule::Refl: return arity(0) && raw_equal(a, b);
    case Rule::Trans:
        return arity(2) && raw_equal(ps[0]->lhs, a) && raw_equal(ps[1]->rhs, b) && raw_equal(ps[0]->rhs, ps[1]->lhs);
    case Rule::Top: return arity(0) && b->kind == K::Omega;
    case Rule::MeetL: return arity(0) && a->kind == K::Meet && raw_equal(a->a, b);
    case Rule::MeetR: return arity(0) && a->kind == K::Meet && raw_equal(a->b, b);
    case Rule::Glb: return arity(2) && b->kind == K::Meet && premise_is(ps[0], a, b->a) && premise_is(ps[1], a, b->b);
    case Rule::Ax1:
        return arity(0) && is_omega(a, Sort::D) && b->kind == K::Arrow && is_omega(b->a, Sort::D) &&
               is_omega(b->b, Sort::T);
    case Rule::Ax6:
        return arity(0) && is_omega(a, Sort::T) && b->kind == K::Arrow && is_omega(b->a, Sort::S) &&
               is_omega(b->b, Sort::C);
    case Rule::Ax2:
    case Rule::Ax7: {
        Sort s = p.rule == Rule::Ax2 ? Sort::D : Sort::T;
        if (!arity(0) || a->sort != s || a->kind != K::Meet || b->kind != K::Arrow) return false;
        const Raw& x = a->a;
        const Raw& y = a->b;
        return x->kind == K::Arrow && y->kind == K::Arrow && raw_equal(x->a, y->a) && raw_equal(b->a, x->a) &&
               b->b->kind == K::Meet && raw_equal(b->b->a, x->b) && raw_equal(b->b->b, y->b);
    }
    case Rule::Ax3: {
        if (!arity(0) || a->kind != K::Meet || b->kind != K::Rec) return false;
        const Raw& x = a->a;
        const Raw& y = a->b;
        return x->kind == K::Rec && y->kind == K::Rec && x->loc == y->loc && b->loc == x->loc &&
               b->a->kind == K::Meet && raw_equal(b->a->a, x->a) && raw_equal(b->a->b, y->a);
    }
    case Rule::Ax5: {
        if (!arity(0) || a->kind != K::Meet || b->kind != K::Prod) return false;
        const Raw& x = a->a;
        const Raw& y = a->b;
        return x->kind == K::Prod && y->kind == K::Prod && b->a->kind == K::Meet && b->b->kind == K::Meet &&
               raw_equal(b->a->a, x->a) && raw_equal(b->a->b, y->a) && raw_equal(b->b->a, x->b) &&
               raw_equal(b->b->b, y->b);
    }
    case Rule::Arrow:
        return arity(2) && a->kind == K::Arrow && b->kind == K::Arrow && premise_is(ps[0], b->a, a->a) &&
               premise_is(ps[1], a->b, b->b);
    case Rule::Rec:
        return arity(1) && a->kind == K::Rec && b->kind == K::Rec && a->loc == b->loc && premise_is(ps[0], a->a, b->a);
    case Rule::Prod:
        return arity(2) && a->kind == K::Prod && b->kind == K::Prod && premise_is(ps[0], a->a, b->a) &&
               premise_is(ps[1], a->b, b->b);
    }
    return false;
}

SubProofPtr mk(Rule r, Raw a, Raw b, std::vector<SubProofPtr> ps = {}) {
    return std::make_shared<const SubProof>(SubProof{r, std::move(a), std::move(b), std::move(ps)});
}

SubProofPtr refl(const Raw& a) { return mk(Rule::Refl, a, a); }

SubProofPtr trans(const SubProofPtr& p, const SubProofPtr& q) {
    if (p->rule == Rule::Refl) return q;
    if (q->rule == Rule::Refl) return p;
    return mk(Rule::Trans, p->lhs, q->rhs, {p, q});
}

SubProofPtr top(const Raw& a) { return mk(Rule::Top, a, r_omega(a->sort)); }

struct Leaf {
    Raw type;
    SubProofPtr proof;  // whole <= leaf
};

void leaves(const Raw& whole, const Raw& t, const SubProofPtr& to_t, std::vector<Leaf>& out) {
    if (t->kind == K::Meet) {
        leaves(whole, t->a, trans(to_t, mk(Rule::MeetL, t, t->a)), out);
        leaves(whole, t->b, trans(to_t, mk(Rule::MeetR, t, t->b)), out);
        return;
    }
    out.push_back({t, to_t});
}

// From proofs of a <= x_i build a <= x_1 /\ (x_2 /\ ...).
SubProofPtr glb_all(const std::vector<SubProofPtr>& ps, std::size_t from = 0) {
    if (from + 1 == ps.size()) return ps[from];
    SubProofPtr rest = glb_all(ps, from + 1);
    return mk(Rule::Glb, ps[from]->lhs, r_meet(ps[from]->rhs, rest->rhs), {ps[from], rest});
}

// (d -> t1) /\ ((d -> t2) /\ ...) <= d -> (t1 /\ (t2 /\ ...))
SubProofPtr distribute_arrow(const Raw& d, const std::vector<Raw>& cods, std::size_t from = 0) {
    Raw head = r_arrow(d, cods[from]);
    if (from + 1 == cods.size()) return refl(head);
    std::vector<Raw> rest_arrows;
    for (std::size_t i = from + 1; i < cods.size(); ++i) rest_arrows.push_back(r_arrow(d, cods[i]));
    Raw rest = r_meet_all(d->sort == Sort::D ? Sort::D : Sort::T, rest_arrows);
    SubProofPtr r = distribute_arrow(d, cods, from + 1);
    Raw lhs = r_meet(head, rest);
    Raw mid = r_meet(head, r->rhs);
    SubProofPtr step1 = mk(Rule::Glb, lhs, mid, {mk(Rule::MeetL, lhs, head), trans(mk(Rule::MeetR, lhs, rest), r)});
    Raw out = r_arrow(d, r_meet(cods[from], r->rhs->b));
    SubProofPtr step2 = mk(d->sort == Sort::D ? Rule::Ax2 : Rule::Ax7, mid, out);
    return trans(step1, step2);
}

// <l : d1> /\ (<l : d2> /\ ...) <= <l : d1 /\ (d2 /\ ...)>
SubProofPtr distribute_rec(Loc l, const std::vector<Raw>& ds, std::size_t from = 0) {
    Raw head = r_rec(l, ds[from]);
    if (from + 1 == ds.size()) return refl(head);
    std::vector<Raw> rest_recs;
    for (std::size_t i = from + 1; i < ds.size(); ++i) rest_recs.push_back(r_rec(l, ds[i]));
    Raw rest = r_meet_all(Sort::S, rest_recs);
    SubProofPtr r = distribute_rec(l, ds, from + 1);
    Raw lhs = r_meet(head, rest);
    Raw mid = r_meet(head, r->rhs);
    SubProofPtr step1 = mk(Rule::Glb, lhs, mid, {mk(Rule::MeetL, lhs, head), trans(mk(Rule::MeetR, lhs, rest), r)});
    return trans(step1, mk(Rule::Ax3, mid, r_rec(l, r_meet(ds[from], r->rhs->a))));
}

// products likewise, componentwise
SubProofPtr distribute_prod(const std::vector<Raw>& ds, const std::vector<Raw>& ss, std::size_t from = 0) {
    Raw head = r_prod(ds[from], ss[from]);
    if (from + 1 == ds.size()) return refl(head);
    std::vector<Raw> rest_prods;
    for (std::size_t i = from + 1; i < ds.size(); ++i) rest_prods.push_back(r_prod(ds[i], ss[i]));
    Raw rest = r_meet_all(Sort::C, rest_prods);
    SubProofPtr r = distribute_prod(ds, ss, from + 1);
    Raw lhs = r_meet(head, rest);
    Raw mid = r_meet(head, r->rhs);
    SubProofPtr step1 = mk(Rule::Glb, lhs, mid, {mk(Rule::MeetL, lhs, head), trans(mk(Rule::MeetR, lhs, rest), r)});
    return trans(step1, mk(Rule::Ax5, mid, r_prod(r_meet(ds[from], r->rhs->a), r_meet(ss[from], r->rhs->b))));
}

// Nonempty subsets of {0..n-1}, smallest first.
std::vector<std::vector<std::size_t>> subsets(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.size() < y.size(); });
    return out;
}

}  // namespace

bool check_subproof(const SubProofPtr& p) {
    if (!p || !local_ok(*p)) return false;
    for (const auto& q : p->premises)
        if (!check_subproof(q)) return false;
    return true;
}

std::size_t subproof_size(const SubProofPtr& p) {
    std::size_t n = 1;
    for (const auto& q : p->premises) n += subproof_size(q);
    return n;
}

SubProofPtr SubtypeOracle::prove(const Raw& a, const Raw& b, unsigned depth) {
    if (a->sort != b->sort) return nullptr;
    if (raw_equal(a, b)) return refl(a);
    if (b->kind == K::Omega) return top(a);
    std::string key = raw_key(a) + "<=" + raw_key(b);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second.proved ? it->second.proof : nullptr;
    if (depth == 0) {
        exceeded_ = true;
        return nullptr;
    }
    bool outer = exceeded_;
    exceeded_ = false;
    SubProofPtr result;
    if (b->kind == K::Meet) {
        SubProofPtr p = prove(a, b->a, depth - 1);
        SubProofPtr q = p ? prove(a, b->b, depth - 1) : nullptr;
        if (p && q) result = mk(Rule::Glb, a, b, {p, q});
    } else {
        result = prove_atom(a, b, depth);
    }
    if (result || !exceeded_) memo_[key] = {result != nullptr, result};
    exceeded_ = exceeded_ || outer;
    return result;
}

SubProofPtr SubtypeOracle::prove_atom(const Raw& a, const Raw& b, unsigned depth) {
    std::vector<Leaf> ls;
    leaves(a, a, refl(a), ls);
    for (const auto& l : ls)
        if (raw_equal(l.type, b)) return l.proof;

    if (b->kind == K::Arrow) {
        Sort dom_sort = b->a->sort, cod_sort = b->b->sort;
        // Codomain above omega: go through the omega arrow axiom.
        if (SubProofPtr q = prove(r_omega(cod_sort), b->b, depth - 1)) {
            Raw w = r_omega(a->sort);
            Raw ww = r_arrow(r_omega(dom_sort), r_omega(cod_sort));
            SubProofPtr ax = mk(a->sort == Sort::D ? Rule::Ax1 : Rule::Ax6, w, ww);
            SubProofPtr cong = mk(Rule::Arrow, ww, b, {top(b->a), q});
            return trans(top(a), trans(ax, cong));
        }
        std::vector<std::pair<const Leaf*, SubProofPtr>> cands;  // leaf, b.dom <= leaf.dom
        for (const auto& l : ls)
            if (l.type->kind == K::Arrow)
                if (SubProofPtr p = prove(b->a, l.type->a, depth - 1)) cands.emplace_back(&l, p);
        for (const auto& j : subsets(cands.size())) {
            std::vector<Raw> cods;
            for (auto i : j) cods.push_back(cands[i].first->type->b);
            Raw meet_cod = r_meet_all(cod_sort, cods);
            SubProofPtr q = prove(meet_cod, b->b, depth - 1);
            if (!q) continue;
            // a <= /\ (b.dom -> t_j) <= b.dom -> /\ t_j <= b
            std::vector<SubProofPtr> each;
            for (auto i : j) {
                const Leaf* l = cands[i].first;
                Raw target = r_arrow(b->a, l->type->b);
                each.push_back(trans(l->proof, mk(Rule::Arrow, l->type, target, {cands[i].second, refl(l->type->b)})));
            }
            SubProofPtr sel = glb_all(each);
            SubProofPtr dist = distribute_arrow(b->a, cods);
            SubProofPtr fin = mk(Rule::Arrow, dist->rhs, b, {refl(b->a), q});
            return trans(sel, trans(dist, fin));
        }
        return nullptr;
    }

    if (b->kind == K::Rec) {
        std::vector<const Leaf*> cands;
        for (const auto& l : ls)
            if (l.type->kind == K::Rec && l.type->loc == b->loc) cands.push_back(&l);
        for (const auto& j : subsets(cands.size())) {
            std::vector<Raw> ds;
            for (auto i : j) ds.push_back(cands[i]->type->a);
            SubProofPtr q = prove(r_meet_all(Sort::D, ds), b->a, depth - 1);
            if (!q) continue;
            std::vector<SubProofPtr> each;
            for (auto i : j) each.push_back(cands[i]->proof);
            SubProofPtr dist = distribute_rec(b->loc, ds);
            return trans(glb_all(each), trans(dist, mk(Rule::Rec, dist->rhs, b, {q})));
        }
        return nullptr;
    }

    if (b->kind == K::Prod) {
        std::vector<const Leaf*> cands;
        for (const auto& l : ls)
            if (l.type->kind == K::Prod) cands.push_back(&l);
        for (const auto& j : subsets(cands.size())) {
            std::vector<Raw> ds, ss;
            for (auto i : j) {
                ds.push_back(cands[i]->type->a);
                ss.push_back(cands[i]->type->b);
            }
            SubProofPtr q = prove(r_meet_all(Sort::D, ds), b->a, depth - 1);
            if (!q) continue;
            SubProofPtr r = prove(r_meet_all(Sort::S, ss), b->b, depth - 1);
            if (!r) continue;
            std::vector<SubProofPtr> each;
            for (auto i : j) each.push_back(cands[i]->proof);
            SubProofPtr dist = distribute_prod(ds, ss);
            return trans(glb_all(each), trans(dist, mk(Rule::Prod, dist->rhs, b, {q, r})));
        }
        return nullptr;
    }
    return nullptr;
}

OracleAnswer SubtypeOracle::query(const Raw& a, const Raw& b) {
    exceeded_ = false;
    SubProofPtr p = prove(a, b, depth_);
    if (p) return {OracleResult::Proved, p};
    return {exceeded_ ? OracleResult::DepthExceeded : OracleResult::Refuted, nullptr};
}

OracleAnswer subtype_oracle(const Raw& a, const Raw& b, unsigned depth) {
    SubtypeOracle o(depth);
    return o.query(a, b);
}

}  // namespace limp
