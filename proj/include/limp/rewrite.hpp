#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "limp/store.hpp"

namespace limp {

// All store terms (resp. lookup terms) of size <= max_size over the given
// locations and values, ordered by size.
std::vector<Store> enumerate_stores(const std::vector<Loc>& locs, const std::vector<Value>& values,
                                    std::size_t max_size);
std::vector<Lookup> enumerate_lookups(const std::vector<Loc>& locs, const std::vector<Value>& values,
                                      std::size_t max_size);

// Brute-force equational reasoning with the five store/lookup axioms,
// applied in both directions at every position. Terms stay within
// max_size; the instantiations introduced by right-to-left steps are
// drawn from the given locations and values.
class StoreRewriter {
public:
    StoreRewriter(std::vector<Loc> locs, std::vector<Value> values, std::size_t max_size);

    const std::vector<Store>& neighbors(const Store& s);
    // Keys of every term reachable in at most `depth` steps.
    std::unordered_set<std::string> closure(const Store& s, unsigned depth);
    bool provable(const Store& s, const Store& t, unsigned depth);

private:
    void store_steps(const Store& s, std::size_t slack, std::vector<Store>& out) const;
    void lookup_steps(const Lookup& u, std::size_t slack, std::vector<Lookup>& out) const;

    std::vector<Loc> locs_;
    std::vector<Value> values_;
    std::size_t max_size_;
    std::vector<Store> store_menu_;
    std::vector<Lookup> lookup_menu_;
    std::unordered_map<std::string, std::vector<Store>> cache_;
};

// Locations and values are taken from s and t; terms may grow by two
// beyond the larger input.
bool rewrite_oracle(const Store& s, const Store& t, unsigned depth);

}  // namespace limp
