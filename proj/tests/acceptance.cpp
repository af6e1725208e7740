// Runs every acceptance suite and prints one verdict line per criterion.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "limp/suites.hpp"

int main(int argc, char** argv) {
    limp::SuiteOptions opt;
    if (const char* s = std::getenv("LIMP_SEED")) opt.seed = std::strtoull(s, nullptr, 10);
    bool all = true;
    for (const auto& name : limp::suite_names()) {
        if (argc > 1 && name != argv[1]) continue;
        limp::SuiteReport r = limp::run_suite(name, opt);
        std::printf("%s criterion %d (%s): %zu cases, %zu failures, %.1fs; %s\n", r.pass ? "PASS" : "FAIL", r.criterion,
                    r.name.c_str(), r.cases, r.failures, r.seconds, r.detail.c_str());
        for (const auto& e : r.examples) std::printf("    %s\n", e.c_str());
        std::fflush(stdout);
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
