#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "limp/store.hpp"
#include "limp/syntax.hpp"

namespace limp {

struct Configuration {
    Comp comp;
    Store store;
};

bool closed(const Configuration& c);
bool same_config(const Configuration& a, const Configuration& b);

struct StepOutcome {
    enum class Kind { Next, Value, Blocked };
    Kind kind;
    Configuration config;  // successor for Next, the input otherwise
    limp::Value value;     // Value only
};

enum class StepRule { Beta, BindContext, Get, Set };

// Throws OpenTerm when the configuration is not closed.
StepOutcome step(const Configuration& c);
// Which reduction rule fires at the root; nullopt for results and blocked configurations.
std::optional<StepRule> redex_rule(const Configuration& c);
bool is_blocked(const Configuration& c);

struct RunOutcome {
    enum class Kind { Converged, Blocked, FuelExhausted };
    Kind kind;
    Value value;           // Converged
    Store store;           // Converged
    Configuration config;  // Blocked / FuelExhausted: the last configuration
    std::size_t steps = 0;
    std::size_t index = 0;  // Converged: weight of the big-step derivation
};

constexpr std::size_t kDefaultFuel = 10000;

// Fuel from LIMP_FUEL when set to a positive integer, kDefaultFuel otherwise.
std::size_t default_fuel();

RunOutcome run(const Configuration& c, std::size_t fuel, std::vector<Configuration>* trace = nullptr);
RunOutcome eval_big(const Configuration& c, std::size_t fuel);

enum class Verdict { True, False, Unknown };

struct Convergence {
    Verdict verdict;
    RunOutcome outcome;
};

// Evaluates (M, emp).
Convergence converges(const Comp& m, std::size_t fuel);

const char* outcome_name(RunOutcome::Kind k);

}  // namespace limp
