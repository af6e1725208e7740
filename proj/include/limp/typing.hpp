#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "limp/derivation.hpp"
#include "limp/operational.hpp"

namespace limp {

// ---- building blocks

Deriv d_omega(const Subject& s);
// Binary intersections folded to the right; an omega node when empty.
// Premises with the same canonical type are collapsed.
Deriv d_meet_all(const Subject& s, const std::vector<Deriv>& ds);
// `d` itself when its type is literally `target`, a (sub) node otherwise.
// Throws Error when the subtyping does not hold.
Deriv coerce(const Deriv& d, const Raw& target);
Deriv d_conf(const Deriv& comp, const Deriv& store);

// Rewrites every subject to the corresponding part of `target`, which must
// be alpha-equivalent to the root subject.
Deriv align(const Deriv& d, const Subject& target);

// The structural nodes reachable through omega, intersection and
// subsumption nodes. The intersection of their types is below the root type.
std::vector<Deriv> frontier(const Deriv& d);

// For a configuration derivation (M, s) : k, a derivation of M : s* -> k and
// one of s : s*, with s* the intersection of the store types in its frontier.
struct ConfParts {
    Raw sigma;
    Deriv comp;
    Deriv store;
};
ConfParts conf_normal(const Deriv& d);

// From s : sigma, a typing of the value stored at each location, such that
// the intersection of the <l : type> is below sigma.
using StoreTable = std::map<Loc, Deriv>;
StoreTable store_table(const Deriv& store_deriv);

// s : <l : d>, from a derivation of the value stored at l in s.
Deriv type_store_at(const Store& s, Loc l, const Deriv& value_deriv);

// Types the value at each location of the target.
using ValueTyper = std::function<Deriv(Loc, const Value&, const Raw&)>;
// nullptr when some location is missing or the typer gives up.
Deriv type_store_target(const Store& s, const Raw& sigma, const ValueTyper& typer);
// Every location of nf(s) at wD; wS for emp.
Deriv type_store(const Store& s);

// ---- substitution and expansion

// From G, x:d |- M : t and G |- V : d, a derivation of G |- M[V/x] : t.
// Both inputs are checked first (InputInvalid).
Deriv subst_derivation(const Context& g, const std::string& x, const Deriv& dm, const Deriv& dv);

struct Expansion {
    Raw delta;
    Deriv value;  // G |- V : delta
    Deriv comp;   // G, x:delta |- M : t
};
// D must type M[V/x]; DecompositionMismatch otherwise.
Expansion expand_derivation(const Context& g, const Deriv& d, const Comp& m, const std::string& x, const Value& v);

// ---- reduction steps

// D : (M, s) : k and the step (M, s) -> (N, t); the result types (N, t) : k.
Deriv preserve_step(const Context& g, const Deriv& d, const Configuration& from, const Configuration& to);
// D : (N, t) : k and the step (M, s) -> (N, t); the result types (M, s) : k.
Deriv expand_step(const Context& g, const Deriv& d, const Configuration& from, const Configuration& to);

struct Certificate {
    std::vector<Configuration> trace;
    Deriv config;  // |- (M, emp) : wD x wS
    Deriv term;    // |- M : wS -> wD x wS
};

struct CertifyResult {
    bool ok = false;
    RunOutcome outcome;
    Certificate cert;
};

Raw convergence_type();  // wS -> wD x wS
CertifyResult certify_convergence(const Comp& m, std::size_t fuel);

// ---- bounded search

// Goal-directed synthesis; nullptr means nothing was found within depth.
Deriv search_typing(const Context& g, const Comp& m, const Raw& tau, unsigned depth);
Deriv search_value(const Context& g, const Value& v, const Raw& delta, unsigned depth);

}  // namespace limp
