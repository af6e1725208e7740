#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace limp {

using Loc = unsigned;

struct ValueNode;
struct CompNode;
using Value = std::shared_ptr<const ValueNode>;
using Comp = std::shared_ptr<const CompNode>;

using VarSet = std::set<std::string>;

struct ValueNode {
    enum class Kind { Var, Lam };
    Kind kind;
    std::string name;  // variable name, or binder of an abstraction
    Comp body;         // Lam only
};

// In Bind, `comp` is the left computation and `val` the function position.
struct CompNode {
    enum class Kind { Unit, Bind, Get, Set };
    Kind kind;
    Value val;         // Unit, Bind, Set
    Comp comp;         // Bind (left), Get (body), Set (continuation)
    Loc loc = 0;       // Get, Set
    std::string name;  // Get binder
};

Value var(std::string name);
Value lam(std::string binder, Comp body);
Comp unit(Value v);
Comp bind(Comp m, Value v);
Comp get(Loc l, std::string binder, Comp body);
Comp set(Loc l, Value v, Comp m);

VarSet free_vars(const Value& v);
VarSet free_vars(const Comp& m);
bool is_free(const std::string& x, const Value& v);
bool is_free(const std::string& x, const Comp& m);
bool closed(const Value& v);
bool closed(const Comp& m);

// Every name occurring in the term, bound or free.
void collect_names(const Value& v, VarSet& out);
void collect_names(const Comp& m, VarSet& out);

// `base` itself when free to use, otherwise base', base'', ...
std::string fresh_variant(const std::string& base, const VarSet& avoid);
// Always primed at least once.
std::string fresh_prime(const std::string& base, const VarSet& avoid);

// Capture-avoiding M[V/x]. Returns the input pointer when x is not free.
Comp substitute(const Comp& m, const std::string& x, const Value& v);
Value substitute(const Value& w, const std::string& x, const Value& v);

bool alpha_eq(const Value& a, const Value& b);
bool alpha_eq(const Comp& a, const Comp& b);

// Nameless rendering; equal strings iff alpha-equivalent.
std::string nameless_key(const Value& v);
std::string nameless_key(const Comp& m);

std::size_t size(const Value& v);
std::size_t size(const Comp& m);

// Locations mentioned by get/set.
void collect_locs(const Comp& m, std::set<Loc>& out);

// Surface encodings.
Comp let_in(const std::string& x, Comp m, Comp n);
Comp app_value(Value v, Value w);
Comp app_comp(Comp m, Comp n);
Comp seq(Comp m, Comp n);

// unit(\x. unit x >>= x) >>= (\x. unit x >>= x)
Comp omega_c();
// \x. unit x
Value identity_value();

}  // namespace limp
