#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "limp/types.hpp"

namespace limp {

// Explicit derivations in the axiomatic subtyping theory.
struct SubProof;
using SubProofPtr = std::shared_ptr<const SubProof>;

struct SubProof {
    enum class Rule {
        Refl,
        Trans,  // premises: a <= m, m <= b
        Top,
        MeetL,  // a /\ b <= a
        MeetR,  // a /\ b <= b
        Glb,    // premises: a <= b1, a <= b2
        Ax1,
        Ax2,
        Ax3,
        Ax5,
        Ax6,
        Ax7,
        Arrow,  // premises: domain (contravariant), codomain
        Rec,
        Prod,
    };
    Rule rule;
    Raw lhs, rhs;
    std::vector<SubProofPtr> premises;
};

const char* subproof_rule_name(SubProof::Rule r);
// Node-by-node check against the axioms and rules of the theory.
bool check_subproof(const SubProofPtr& p);
std::size_t subproof_size(const SubProofPtr& p);

enum class OracleResult { Proved, Refuted, DepthExceeded };

struct OracleAnswer {
    OracleResult result;
    SubProofPtr proof;  // Proved only
};

// Goal-directed proof search on raw types. Every goal costs one unit of
// depth; Refuted means the search space was exhausted below the limit.
// Results are memoised across queries.
class SubtypeOracle {
public:
    explicit SubtypeOracle(unsigned depth) : depth_(depth) {}
    OracleAnswer query(const Raw& a, const Raw& b);

private:
    struct Entry {
        bool proved;
        SubProofPtr proof;
    };
    SubProofPtr prove(const Raw& a, const Raw& b, unsigned depth);
    SubProofPtr prove_atom(const Raw& a, const Raw& b, unsigned depth);

    unsigned depth_;
    bool exceeded_ = false;
    std::unordered_map<std::string, Entry> memo_;
};

OracleAnswer subtype_oracle(const Raw& a, const Raw& b, unsigned depth);

}  // namespace limp
