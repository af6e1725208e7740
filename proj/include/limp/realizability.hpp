#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "limp/derivation.hpp"
#include "limp/operational.hpp"
#include "limp/types.hpp"

namespace limp {

struct Budget {
    std::size_t max_samples = 50;
    std::size_t fuel = 500;
    std::size_t max_term_size = 8;
};

// Throws InputInvalid unless every field is positive.
void validate(const Budget& b);

// One input fed to the entity on the way to the counterexample.
struct Probe {
    enum class Kind { Argument, Store };
    Kind kind;
    Value arg;
    limp::Store store;
};

struct Witness {
    std::vector<Probe> inputs;
    std::string observed;  // e.g. "blocked", "fuel-exhausted", "l0 not in dom"
};

enum class Membership { Yes, No, Unknown };
const char* membership_name(Membership m);

struct MembershipVerdict {
    Membership verdict = Membership::Yes;
    bool exhaustive = true;  // every quantified domain slice was covered
    std::optional<Witness> witness;
    Budget budget;
    std::uint64_t seed = 0;
};

// A configuration outcome: a result, or the divergence symbol.
struct Result {
    bool bottom = true;
    Value value;
    limp::Store store;
};
Result result_of(const RunOutcome& o);

// Sampling state. A quantifier over the interpretation of a type of rank k
// (arrow nesting depth) draws at most max(1, max_samples >> k) elements, so
// verdicts depend only on the entity, the type, the budget and the seed.
class Realizer {
public:
    Realizer(Budget b, std::uint64_t seed, LocSet locs = {});

    MembershipVerdict member(const Value& v, const Raw& delta);
    MembershipVerdict member(const limp::Store& s, const Raw& sigma);
    MembershipVerdict member(const Result& r, const Raw& kappa);
    MembershipVerdict member(const Comp& m, const Raw& tau);

    // Closed values up to the size bound, at most max_samples, each verified
    // at delta; Unknowns dropped.
    std::vector<Value> gen_values(const Raw& delta);
    // Stores binding every entry of sigma plus up to two unconstrained
    // locations; emp first for wS. Throws EmptyGenerator.
    std::vector<limp::Store> gen_stores(const Raw& sigma);

private:
    struct Sample {
        std::vector<Value> values;
        bool full = false;  // the whole enumeration slice was used
    };
    struct StoreSample {
        std::vector<limp::Store> stores;
        bool full = false;
    };

    MembershipVerdict mv(const Value& v, const VType& d, std::uint64_t seed);
    MembershipVerdict ms(const limp::Store& s, const SType& d, std::uint64_t seed);
    MembershipVerdict mk(const Result& r, const KType& k, std::uint64_t seed);
    MembershipVerdict mc(const Comp& m, const CType& t, std::uint64_t seed);
    const Sample& values_for(const VType& d);
    const StoreSample& stores_for(const SType& s);
    const std::vector<Value>& closed_values();
    std::size_t samples_at(unsigned rank) const;
    static unsigned rank(const VType& d);
    static unsigned rank(const SType& s);
    MembershipVerdict verdict(Membership m, bool exhaustive) const;
    void note_locs(const Raw& t);

    Budget budget_;
    std::uint64_t seed_;
    LocSet locs_;
    std::vector<Value> enumeration_;
    bool enumerated_ = false;
    std::map<std::string, Sample> value_cache_;
    std::map<std::string, StoreSample> store_cache_;
    std::map<std::string, MembershipVerdict> verdict_cache_;
};

MembershipVerdict member(const Value& v, const Raw& delta, const Budget& b, std::uint64_t seed = 0);
MembershipVerdict member(const Store& s, const Raw& sigma, const Budget& b, std::uint64_t seed = 0);
MembershipVerdict member(const Result& r, const Raw& kappa, const Budget& b, std::uint64_t seed = 0);
MembershipVerdict member(const Comp& m, const Raw& tau, const Budget& b, std::uint64_t seed = 0);
std::vector<Value> gen_values(const Raw& delta, const Budget& b, std::uint64_t seed = 0);
std::vector<Store> gen_stores(const Raw& sigma, const Budget& b, std::uint64_t seed = 0);

// Closed values of size at most n, smallest first, binders named x0, x1, ...
// by depth; get/set range over `locs`.
std::vector<Value> enumerate_closed_values(std::size_t n, const LocSet& locs);

struct Counterexample {
    std::map<std::string, Value> substitution;
    Comp instance;
    Witness witness;
};

// Samples closing substitutions from the context types and tests the
// instance at the derived type. `check` false skips the derivation check.
std::optional<Counterexample> falsify_compLemma(const Context& g, const Deriv& d, const Budget& b,
                                                std::uint64_t seed = 0, bool check = true);

}  // namespace limp
