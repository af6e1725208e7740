#pragma once

#include <random>
#include <vector>

#include "limp/operational.hpp"
#include "limp/types.hpp"

namespace limp {

using Rng = std::mt19937_64;

struct TermShape {
    std::size_t max_size = 20;
    std::vector<Loc> locs{0, 1, 2};
};

// Closed computation of size at most shape.max_size, free of the names in `scope`
// unless it picks them as variables.
Comp random_comp(Rng& rng, const TermShape& shape, const std::vector<std::string>& scope = {});
Value random_value(Rng& rng, const TermShape& shape, const std::vector<std::string>& scope = {});
// Closed store with values built by random_value; may contain lookups.
Store random_store(Rng& rng, const TermShape& shape, std::size_t max_bindings = 3);
Configuration random_config(Rng& rng, const TermShape& shape);

// Draws closed computations until one converges from emp within fuel after
// at least min_steps reductions.
Comp random_converging(Rng& rng, const TermShape& shape, std::size_t fuel, std::size_t min_steps = 0,
                       std::size_t max_tries = 100000);

struct TypeShape {
    std::size_t depth = 3;
    std::vector<Loc> locs{0, 1};
};

Raw random_type(Rng& rng, Sort s, const TypeShape& shape);
// A random supertype (weaken) or subtype (strengthen) of t, built only from
// steps that are sound for subtyping.
Raw weaken(Rng& rng, const Raw& t, const TypeShape& shape);
Raw strengthen(Rng& rng, const Raw& t, const TypeShape& shape);

}  // namespace limp
