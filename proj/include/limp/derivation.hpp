#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "limp/operational.hpp"
#include "limp/store.hpp"
#include "limp/syntax.hpp"
#include "limp/types.hpp"

namespace limp {

struct Subject {
    enum class Kind { Value, Comp, Store, Lookup, Config };
    Kind kind;
    limp::Value value;
    limp::Comp comp;  // Comp, Config
    limp::Store store;  // Store, Config
    limp::Lookup lookup;

    static Subject of(limp::Value v) { return {Kind::Value, std::move(v), nullptr, nullptr, nullptr}; }
    static Subject of(limp::Comp m) { return {Kind::Comp, nullptr, std::move(m), nullptr, nullptr}; }
    static Subject of(limp::Store s) { return {Kind::Store, nullptr, nullptr, std::move(s), nullptr}; }
    static Subject of(limp::Lookup u) { return {Kind::Lookup, nullptr, nullptr, nullptr, std::move(u)}; }
    static Subject of(const Configuration& c) { return {Kind::Config, nullptr, c.comp, c.store, nullptr}; }
};

// The type sort a subject of this kind is typed at.
Sort subject_sort(Subject::Kind k);
bool same_subject(const Subject& a, const Subject& b);
std::string render(const Subject& s, bool unicode = false);

enum class DRule { Omega, Meet, Sub, Var, Lam, Unit, Bind, Get, Set, UpdA, UpdB, Lkp, Conf };
const char* rule_name(DRule r);
std::optional<DRule> rule_from_name(const std::string& s);

struct DerivNode;
using Deriv = std::shared_ptr<const DerivNode>;

// Contexts are not stored in nodes: they are threaded from the root and
// extended at the binders of (lam) and (get).
struct DerivNode {
    DRule rule;
    Subject subject;
    Raw type;
    Type canon;
    std::vector<Deriv> premises;
};

Deriv make_deriv(DRule rule, Subject subject, Raw type, std::vector<Deriv> premises = {});
std::size_t deriv_size(const Deriv& d);
std::size_t deriv_height(const Deriv& d);

struct CtxEntry {
    Raw raw;
    VType canon;
};
using Context = std::map<std::string, CtxEntry>;

Context ctx_extend(Context g, const std::string& x, const Raw& d);

enum class CheckReason { ShapeMismatch, SubtypeFails, SideConditionFails, ContextMismatch };
const char* reason_name(CheckReason r);

struct CheckResult {
    bool ok = true;
    std::vector<std::size_t> path;  // premise indices from the root
    CheckReason reason = CheckReason::ShapeMismatch;
    std::string message;

    std::string describe() const;
};

CheckResult check_derivation(const Context& g, const Deriv& d);

// A derivation with its root context.
struct Judgment {
    Context context;
    Deriv root;
};

// Text format: optional `[x : d, ...] |-` header, then
// `(rule {subject} : type premise*)`.
std::string render_derivation(const Judgment& j, bool unicode = false);
Judgment parse_derivation(const std::string& src);

}  // namespace limp
