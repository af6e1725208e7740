#pragma once

#include <memory>
#include <set>
#include <string>

#include "limp/syntax.hpp"

namespace limp {

struct StoreNode;
struct LookupNode;
using Store = std::shared_ptr<const StoreNode>;
using Lookup = std::shared_ptr<const LookupNode>;

using LocSet = std::set<Loc>;

struct StoreNode {
    enum class Kind { Emp, Upd };
    Kind kind;
    Loc loc = 0;
    Lookup entry;  // Upd only
    Store rest;    // Upd only
};

struct LookupNode {
    enum class Kind { Val, Lkp };
    Kind kind;
    Value val;    // Val
    Loc loc = 0;  // Lkp
    Store store;  // Lkp
};

Store emp();
Store upd(Loc l, Lookup u, Store s);
Store upd(Loc l, Value v, Store s);
Lookup val(Value v);
// Throws WellFormedness unless l is in dom(s).
Lookup lkp(Loc l, Store s);

LocSet dom_store(const Store& s);
bool in_dom(Loc l, const Store& s);

// Throws UndefinedLocation when l is not in dom(s).
Value resolve_lookup(Loc l, const Store& s);
Value resolve(const Lookup& u);

Store remove(const Store& s, Loc l);
Store normal_form(const Store& s);
bool ext_equiv(const Store& s, const Store& t);
bool store_eq(const Store& s, const Store& t);

bool closed(const Store& s);
bool closed(const Lookup& u);
Store substitute(const Store& s, const std::string& x, const Value& v);
Lookup substitute(const Lookup& u, const std::string& x, const Value& v);

// Structural equality with stored values compared up to alpha.
bool same_store(const Store& a, const Store& b);
bool same_lookup(const Lookup& a, const Lookup& b);

// Structure with values replaced by their nameless keys.
std::string store_key(const Store& s);
std::string lookup_key(const Lookup& u);

// emp = 1, upd = 1 + |u| + |s|, a stored value = 1, lkp = 1 + |s|.
std::size_t size(const Store& s);
std::size_t size(const Lookup& u);

}  // namespace limp
