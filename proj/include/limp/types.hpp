#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "limp/store.hpp"

namespace limp {

// D: value types, S: store types, C: result types (products), T: computation types.
enum class Sort { D, S, C, T };
const char* sort_name(Sort s);

// Types as written, before any identification.
struct RawNode;
using Raw = std::shared_ptr<const RawNode>;

struct RawNode {
    enum class Kind { Omega, Arrow, Rec, Prod, Meet };
    Kind kind;
    Sort sort;
    Loc loc = 0;  // Rec
    Raw a, b;     // Arrow: domain, codomain; Rec: a; Prod: value, store; Meet: both
};

Raw r_omega(Sort s);
// The following throw SortMismatch on ill-sorted arguments.
Raw r_arrow(Raw dom, Raw cod);
Raw r_rec(Loc l, Raw d);
Raw r_prod(Raw d, Raw s);
Raw r_meet(Raw a, Raw b);
// Right-nested meet; omega of the sort when empty.
Raw r_meet_all(Sort s, const std::vector<Raw>& parts);

bool raw_equal(const Raw& a, const Raw& b);
// Compact structural rendering, injective on raw types.
std::string raw_key(const Raw& t);
std::size_t raw_depth(const Raw& t);

// Canonical forms. Every node carries a key; two canonical types are
// equivalent exactly when their keys coincide.
struct VT;
struct ST;
struct KT;
struct CT;
using VType = std::shared_ptr<const VT>;
using SType = std::shared_ptr<const ST>;
using KType = std::shared_ptr<const KT>;
using CType = std::shared_ptr<const CT>;

// Intersection of arrows; no arrow has a top codomain; empty means wD.
struct VT {
    std::vector<std::pair<VType, CType>> arrows;
    std::string key;
};

// Intersection of records, one per location; empty means wS.
struct ST {
    std::map<Loc, VType> entries;
    std::string key;
};

// wC, or a single product.
struct KT {
    bool top;
    VType d;
    SType s;
    std::string key;
};

// Intersection of arrows; no arrow has codomain wC; empty means wT.
struct CT {
    std::vector<std::pair<SType, KType>> arrows;
    std::string key;
};

VType v_top();
VType v_arrow(const VType& d, const CType& t);
VType v_meet(const VType& a, const VType& b);
bool sub_v(const VType& a, const VType& b);

SType s_top();
SType s_rec(Loc l, const VType& d);
SType s_meet(const SType& a, const SType& b);
bool sub_s(const SType& a, const SType& b);
// The store type with the entry for l removed.
SType s_without(const SType& s, Loc l);

KType k_top();
KType k_prod(const VType& d, const SType& s);
KType k_meet(const KType& a, const KType& b);
bool sub_k(const KType& a, const KType& b);

CType c_top();
CType c_arrow(const SType& s, const KType& k);
CType c_meet(const CType& a, const CType& b);
bool sub_c(const CType& a, const CType& b);

LocSet dom_sigma(const SType& s);

// A canonical type of some sort.
struct Type {
    Sort sort;
    VType d;
    SType s;
    KType k;
    CType t;

    static Type of(VType v) { return {Sort::D, std::move(v), nullptr, nullptr, nullptr}; }
    static Type of(SType v) { return {Sort::S, nullptr, std::move(v), nullptr, nullptr}; }
    static Type of(KType v) { return {Sort::C, nullptr, nullptr, std::move(v), nullptr}; }
    static Type of(CType v) { return {Sort::T, nullptr, nullptr, nullptr, std::move(v)}; }
    const std::string& key() const;
};

Type normalize_type(const Raw& raw);
Type top_of(Sort s);
bool is_top(const Type& t);
// Both throw SortMismatch when sorts differ.
bool subtype(const Type& a, const Type& b);
bool type_equiv(const Type& a, const Type& b);
Type meet(const Type& a, const Type& b);

Raw to_raw(const VType& t);
Raw to_raw(const SType& t);
Raw to_raw(const KType& t);
Raw to_raw(const CType& t);
Raw to_raw(const Type& t);

// Witness set of the maximal-J check for an arrow target: indices of the
// arrows of `a` whose domain is above the target domain.
std::vector<std::size_t> jmax_v(const VType& a, const VType& target_dom);
std::vector<std::size_t> jmax_c(const CType& a, const SType& target_dom);

}  // namespace limp
