#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "limp/types.hpp"

namespace limp {

struct SuiteOptions {
    std::uint64_t seed = 20261014;
    std::string golden_dir;  // empty: the directory compiled in
};

struct SuiteReport {
    std::string name;
    int criterion = 0;
    bool pass = false;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string detail;
    std::vector<std::string> examples;  // first few failures
    double seconds = 0;
};

std::vector<std::string> suite_names();
// Throws InputInvalid for an unknown name.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opt = {});

// Canonical types over `locs` of constructor depth at most `depth`
// (intersections do not add depth), meet-closed.
struct TypeEnvelope {
    std::vector<VType> d;
    std::vector<SType> s;
    std::vector<KType> k;
    std::vector<CType> t;
};
TypeEnvelope enumerate_types(unsigned depth, const std::vector<Loc>& locs);

std::string default_golden_dir();

}  // namespace limp
