#include "limp/types.hpp"

#include <algorithm>
#include <set>

#include "limp/errors.hpp"

namespace limp {

const char* sort_name(Sort s) {
    switch (s) {
    case Sort::D: return "value";
    case Sort::S: return "store";
    case Sort::C: return "result";
    case Sort::T: return "computation";
    }
    return "?";
}

// ---------------------------------------------------------------- raw types

Raw r_omega(Sort s) { return std::make_shared<const RawNode>(RawNode{RawNode::Kind::Omega, s, 0, nullptr, nullptr}); }

Raw r_arrow(Raw dom, Raw cod) {
    Sort s;
    if (dom->sort == Sort::D && cod->sort == Sort::T)
        s = Sort::D;
    else if (dom->sort == Sort::S && cod->sort == Sort::C)
        s = Sort::T;
    else
        throw SortMismatch(std::string("arrow from ") + sort_name(dom->sort) + " type to " + sort_name(cod->sort) +
                           " type");
    return std::make_shared<const RawNode>(RawNode{RawNode::Kind::Arrow, s, 0, std::move(dom), std::move(cod)});
}

Raw r_rec(Loc l, Raw d) {
    if (d->sort != Sort::D) throw SortMismatch(std::string("record field of ") + sort_name(d->sort) + " type");
    return std::make_shared<const RawNode>(RawNode{RawNode::Kind::Rec, Sort::S, l, std::move(d), nullptr});
}

Raw r_prod(Raw d, Raw s) {
    if (d->sort != Sort::D || s->sort != Sort::S)
        throw SortMismatch(std::string("product of ") + sort_name(d->sort) + " and " + sort_name(s->sort) + " types");
    return std::make_shared<const RawNode>(RawNode{RawNode::Kind::Prod, Sort::C, 0, std::move(d), std::move(s)});
}

Raw r_meet(Raw a, Raw b) {
    if (a->sort != b->sort)
        throw SortMismatch(std::string("intersection of ") + sort_name(a->sort) + " and " + sort_name(b->sort) +
                           " types");
    Sort s = a->sort;
    return std::make_shared<const RawNode>(RawNode{RawNode::Kind::Meet, s, 0, std::move(a), std::move(b)});
}

Raw r_meet_all(Sort s, const std::vector<Raw>& parts) {
    if (parts.empty()) return r_omega(s);
    Raw acc = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) acc = r_meet(parts[i], acc);
    return acc;
}

bool raw_equal(const Raw& a, const Raw& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->sort != b->sort || a->loc != b->loc) return false;
    switch (a->kind) {
    case RawNode::Kind::Omega: return true;
    case RawNode::Kind::Rec: return raw_equal(a->a, b->a);
    default: return raw_equal(a->a, b->a) && raw_equal(a->b, b->b);
    }
}

std::string raw_key(const Raw& t) {
    static const char* tag = "DSCT";
    switch (t->kind) {
    case RawNode::Kind::Omega: return std::string("w") + tag[static_cast<int>(t->sort)];
    case RawNode::Kind::Arrow: return "(" + raw_key(t->a) + ">" + raw_key(t->b) + ")";
    case RawNode::Kind::Rec: return "<" + std::to_string(t->loc) + ":" + raw_key(t->a) + ">";
    case RawNode::Kind::Prod: return "(" + raw_key(t->a) + "x" + raw_key(t->b) + ")";
    case RawNode::Kind::Meet: return "(" + raw_key(t->a) + "&" + raw_key(t->b) + ")";
    }
    return "?";
}

std::size_t raw_depth(const Raw& t) {
    switch (t->kind) {
    case RawNode::Kind::Omega: return 0;
    case RawNode::Kind::Rec: return 1 + raw_depth(t->a);
    default: return 1 + std::max(raw_depth(t->a), raw_depth(t->b));
    }
}

// ---------------------------------------------------------- canonical types

namespace {

using VArrow = std::pair<VType, CType>;
using CArrow = std::pair<SType, KType>;

std::string arrow_key(const VArrow& a) { return "(" + a.first->key + ">" + a.second->key + ")"; }
std::string arrow_key(const CArrow& a) { return "(" + a.first->key + ">" + a.second->key + ")"; }

template <class A>
void sort_dedupe(std::vector<A>& xs) {
    std::vector<std::pair<std::string, A>> keyed;
    keyed.reserve(xs.size());
    for (auto& a : xs) keyed.emplace_back(arrow_key(a), a);
    std::sort(keyed.begin(), keyed.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& p, const auto& q) { return p.first == q.first; }),
                keyed.end());
    xs.clear();
    for (auto& [k, a] : keyed) xs.push_back(a);
}

VType make_v(std::vector<VArrow> arrows) {
    auto t = std::make_shared<VT>();
    t->key = "D{";
    for (auto& a : arrows) t->key += arrow_key(a);
    t->key += "}";
    t->arrows = std::move(arrows);
    return t;
}

CType make_c(std::vector<CArrow> arrows) {
    auto t = std::make_shared<CT>();
    t->key = "T{";
    for (auto& a : arrows) t->key += arrow_key(a);
    t->key += "}";
    t->arrows = std::move(arrows);
    return t;
}

SType make_s(std::map<Loc, VType> entries) {
    auto t = std::make_shared<ST>();
    t->key = "S{";
    for (auto& [l, d] : entries) t->key += std::to_string(l) + ":" + d->key + ";";
    t->key += "}";
    t->entries = std::move(entries);
    return t;
}

// Subtyping against a lazily formed intersection: the left side is a list
// of arrows (or of store/result types) with canonical components.

bool sub_v_list(const std::vector<const VArrow*>& lhs, const VType& rhs);
bool sub_c_list(const std::vector<const CArrow*>& lhs, const CType& rhs);
bool sub_s_list(const std::vector<const ST*>& lhs, const SType& rhs);
bool sub_k_list(const std::vector<const KT*>& lhs, const KType& rhs);

bool sub_v_list(const std::vector<const VArrow*>& lhs, const VType& rhs) {
    for (const auto& [d2, t2] : rhs->arrows) {
        std::vector<const CArrow*> cods;
        bool any = false;
        for (const VArrow* a : lhs)
            if (sub_v(d2, a->first)) {
                any = true;
                for (const auto& c : a->second->arrows) cods.push_back(&c);
            }
        if (!any || !sub_c_list(cods, t2)) return false;
    }
    return true;
}

bool sub_c_list(const std::vector<const CArrow*>& lhs, const CType& rhs) {
    for (const auto& [s2, k2] : rhs->arrows) {
        std::vector<const KT*> cods;
        for (const CArrow* a : lhs)
            if (sub_s(s2, a->first)) cods.push_back(a->second.get());
        if (cods.empty() || !sub_k_list(cods, k2)) return false;
    }
    return true;
}

bool sub_s_list(const std::vector<const ST*>& lhs, const SType& rhs) {
    for (const auto& [l, d2] : rhs->entries) {
        std::vector<const VArrow*> arrows;
        bool present = false;
        for (const ST* s : lhs) {
            auto it = s->entries.find(l);
            if (it == s->entries.end()) continue;
            present = true;
            for (const auto& a : it->second->arrows) arrows.push_back(&a);
        }
        if (!present || !sub_v_list(arrows, d2)) return false;
    }
    return true;
}

bool sub_k_list(const std::vector<const KT*>& lhs, const KType& rhs) {
    if (rhs->top) return true;
    std::vector<const VArrow*> ds;
    std::vector<const ST*> ss;
    bool any = false;
    for (const KT* k : lhs) {
        if (k->top) continue;
        any = true;
        for (const auto& a : k->d->arrows) ds.push_back(&a);
        ss.push_back(k->s.get());
    }
    return any && sub_v_list(ds, rhs->d) && sub_s_list(ss, rhs->s);
}

CType c_meet_list(const std::vector<CType>& parts);
VType norm_v(std::vector<VArrow> arrows);
CType norm_c(std::vector<CArrow> arrows);

bool cod_is_top(const CType& t) { return t->arrows.empty(); }
bool cod_is_top(const KType& k) { return k->top; }

// Shared normalisation scheme for both arrow sorts: drop top codomains,
// give every arrow the best codomain the set offers at its domain, then
// drop arrows implied by the others.
template <class A, class DomSub, class CodMeet, class Implied, class Make>
auto norm_arrows(std::vector<A> arrows, DomSub dom_sub, CodMeet cod_meet, Implied implied, Make make) {
    arrows.erase(std::remove_if(arrows.begin(), arrows.end(), [](const A& a) { return cod_is_top(a.second); }),
                 arrows.end());
    sort_dedupe(arrows);
    if (arrows.size() > 1) {
        std::vector<A> sat;
        sat.reserve(arrows.size());
        for (const auto& a : arrows) {
            std::vector<typename std::decay_t<decltype(a.second)>> cods;
            for (const auto& b : arrows)
                if (dom_sub(a.first, b.first)) cods.push_back(b.second);
            sat.emplace_back(a.first, cods.size() == 1 ? cods[0] : cod_meet(cods));
        }
        sort_dedupe(sat);
        for (std::size_t i = 0; i < sat.size();) {
            std::vector<const A*> others;
            for (std::size_t j = 0; j < sat.size(); ++j)
                if (j != i) others.push_back(&sat[j]);
            if (implied(others, sat[i]))
                sat.erase(sat.begin() + static_cast<long>(i));
            else
                ++i;
        }
        arrows = std::move(sat);
    }
    return make(std::move(arrows));
}

VType norm_v(std::vector<VArrow> arrows) {
    return norm_arrows(
        std::move(arrows), [](const VType& a, const VType& b) { return sub_v(a, b); },
        [](const std::vector<CType>& cs) { return c_meet_list(cs); },
        [](const std::vector<const VArrow*>& others, const VArrow& a) {
            auto single = make_v({a});
            return sub_v_list(others, single);
        },
        [](std::vector<VArrow> xs) { return make_v(std::move(xs)); });
}

KType k_meet_list(const std::vector<KType>& parts) {
    KType acc = k_top();
    for (const auto& k : parts) acc = k_meet(acc, k);
    return acc;
}

CType norm_c(std::vector<CArrow> arrows) {
    return norm_arrows(
        std::move(arrows), [](const SType& a, const SType& b) { return sub_s(a, b); },
        [](const std::vector<KType>& ks) { return k_meet_list(ks); },
        [](const std::vector<const CArrow*>& others, const CArrow& a) {
            auto single = make_c({a});
            return sub_c_list(others, single);
        },
        [](std::vector<CArrow> xs) { return make_c(std::move(xs)); });
}

CType c_meet_list(const std::vector<CType>& parts) {
    std::vector<CArrow> all;
    for (const auto& c : parts) all.insert(all.end(), c->arrows.begin(), c->arrows.end());
    return norm_c(std::move(all));
}

}  // namespace

VType v_top() {
    static const VType t = make_v({});
    return t;
}

VType v_arrow(const VType& d, const CType& t) {
    if (t->arrows.empty()) return v_top();
    return make_v({{d, t}});
}

VType v_meet(const VType& a, const VType& b) {
    if (a->arrows.empty()) return b;
    if (b->arrows.empty() || a->key == b->key) return a;
    std::vector<VArrow> all = a->arrows;
    all.insert(all.end(), b->arrows.begin(), b->arrows.end());
    return norm_v(std::move(all));
}

bool sub_v(const VType& a, const VType& b) {
    if (b->arrows.empty() || a->key == b->key) return true;
    std::vector<const VArrow*> lhs;
    for (const auto& x : a->arrows) lhs.push_back(&x);
    return sub_v_list(lhs, b);
}

SType s_top() {
    static const SType t = make_s({});
    return t;
}

SType s_rec(Loc l, const VType& d) { return make_s({{l, d}}); }

SType s_meet(const SType& a, const SType& b) {
    if (a->entries.empty()) return b;
    if (b->entries.empty() || a->key == b->key) return a;
    std::map<Loc, VType> m = a->entries;
    for (const auto& [l, d] : b->entries) {
        auto it = m.find(l);
        if (it == m.end())
            m.emplace(l, d);
        else
            it->second = v_meet(it->second, d);
    }
    return make_s(std::move(m));
}

bool sub_s(const SType& a, const SType& b) {
    if (a->key == b->key) return true;
    return sub_s_list({a.get()}, b);
}

SType s_without(const SType& s, Loc l) {
    if (!s->entries.count(l)) return s;
    std::map<Loc, VType> m = s->entries;
    m.erase(l);
    return make_s(std::move(m));
}

KType k_top() {
    static const KType t = std::make_shared<const KT>(KT{true, nullptr, nullptr, "C*"});
    return t;
}

KType k_prod(const VType& d, const SType& s) {
    return std::make_shared<const KT>(KT{false, d, s, "C(" + d->key + "x" + s->key + ")"});
}

KType k_meet(const KType& a, const KType& b) {
    if (a->top) return b;
    if (b->top || a->key == b->key) return a;
    return k_prod(v_meet(a->d, b->d), s_meet(a->s, b->s));
}

bool sub_k(const KType& a, const KType& b) {
    if (a->key == b->key) return true;
    return sub_k_list({a.get()}, b);
}

CType c_top() {
    static const CType t = make_c({});
    return t;
}

CType c_arrow(const SType& s, const KType& k) {
    if (k->top) return c_top();
    return make_c({{s, k}});
}

CType c_meet(const CType& a, const CType& b) {
    if (a->arrows.empty()) return b;
    if (b->arrows.empty() || a->key == b->key) return a;
    return c_meet_list({a, b});
}

bool sub_c(const CType& a, const CType& b) {
    if (b->arrows.empty() || a->key == b->key) return true;
    std::vector<const CArrow*> lhs;
    for (const auto& x : a->arrows) lhs.push_back(&x);
    return sub_c_list(lhs, b);
}

LocSet dom_sigma(const SType& s) {
    LocSet out;
    for (const auto& [l, d] : s->entries) out.insert(l);
    return out;
}

std::vector<std::size_t> jmax_v(const VType& a, const VType& target_dom) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < a->arrows.size(); ++i)
        if (sub_v(target_dom, a->arrows[i].first)) out.push_back(i);
    return out;
}

std::vector<std::size_t> jmax_c(const CType& a, const SType& target_dom) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < a->arrows.size(); ++i)
        if (sub_s(target_dom, a->arrows[i].first)) out.push_back(i);
    return out;
}

// ------------------------------------------------------------ sort-generic

const std::string& Type::key() const {
    switch (sort) {
    case Sort::D: return d->key;
    case Sort::S: return s->key;
    case Sort::C: return k->key;
    case Sort::T: return t->key;
    }
    return d->key;
}

Type normalize_type(const Raw& raw) {
    switch (raw->kind) {
    case RawNode::Kind::Omega: return top_of(raw->sort);
    case RawNode::Kind::Rec: return Type::of(s_rec(raw->loc, normalize_type(raw->a).d));
    case RawNode::Kind::Prod: return Type::of(k_prod(normalize_type(raw->a).d, normalize_type(raw->b).s));
    case RawNode::Kind::Arrow: {
        Type a = normalize_type(raw->a), b = normalize_type(raw->b);
        if (raw->sort == Sort::D) return Type::of(v_arrow(a.d, b.t));
        return Type::of(c_arrow(a.s, b.k));
    }
    case RawNode::Kind::Meet: return meet(normalize_type(raw->a), normalize_type(raw->b));
    }
    throw Error("unreachable");
}

Type top_of(Sort s) {
    switch (s) {
    case Sort::D: return Type::of(v_top());
    case Sort::S: return Type::of(s_top());
    case Sort::C: return Type::of(k_top());
    case Sort::T: return Type::of(c_top());
    }
    throw Error("unreachable");
}

bool is_top(const Type& t) {
    switch (t.sort) {
    case Sort::D: return t.d->arrows.empty();
    case Sort::S: return t.s->entries.empty();
    case Sort::C: return t.k->top;
    case Sort::T: return t.t->arrows.empty();
    }
    return false;
}

namespace {
void same_sort(const Type& a, const Type& b) {
    if (a.sort != b.sort)
        throw SortMismatch(std::string("comparing ") + sort_name(a.sort) + " type with " + sort_name(b.sort) + " type");
}
}  // namespace

bool subtype(const Type& a, const Type& b) {
    same_sort(a, b);
    switch (a.sort) {
    case Sort::D: return sub_v(a.d, b.d);
    case Sort::S: return sub_s(a.s, b.s);
    case Sort::C: return sub_k(a.k, b.k);
    case Sort::T: return sub_c(a.t, b.t);
    }
    return false;
}

bool type_equiv(const Type& a, const Type& b) { return subtype(a, b) && subtype(b, a); }

Type meet(const Type& a, const Type& b) {
    same_sort(a, b);
    switch (a.sort) {
    case Sort::D: return Type::of(v_meet(a.d, b.d));
    case Sort::S: return Type::of(s_meet(a.s, b.s));
    case Sort::C: return Type::of(k_meet(a.k, b.k));
    case Sort::T: return Type::of(c_meet(a.t, b.t));
    }
    throw Error("unreachable");
}

Raw to_raw(const VType& t) {
    std::vector<Raw> parts;
    for (const auto& [d, c] : t->arrows) parts.push_back(r_arrow(to_raw(d), to_raw(c)));
    return r_meet_all(Sort::D, parts);
}

Raw to_raw(const SType& t) {
    std::vector<Raw> parts;
    for (const auto& [l, d] : t->entries) parts.push_back(r_rec(l, to_raw(d)));
    return r_meet_all(Sort::S, parts);
}

Raw to_raw(const KType& t) {
    if (t->top) return r_omega(Sort::C);
    return r_prod(to_raw(t->d), to_raw(t->s));
}

Raw to_raw(const CType& t) {
    std::vector<Raw> parts;
    for (const auto& [s, k] : t->arrows) parts.push_back(r_arrow(to_raw(s), to_raw(k)));
    return r_meet_all(Sort::T, parts);
}

Raw to_raw(const Type& t) {
    switch (t.sort) {
    case Sort::D: return to_raw(t.d);
    case Sort::S: return to_raw(t.s);
    case Sort::C: return to_raw(t.k);
    case Sort::T: return to_raw(t.t);
    }
    throw Error("unreachable");
}

}  // namespace limp
