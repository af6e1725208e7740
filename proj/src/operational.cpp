#include "limp/operational.hpp"

#include <cstdlib>
#include <string>

#include "limp/errors.hpp"

namespace limp {

bool closed(const Configuration& c) { return closed(c.comp) && closed(c.store); }

bool same_config(const Configuration& a, const Configuration& b) {
    return alpha_eq(a.comp, b.comp) && same_store(a.store, b.store);
}

namespace {

void require_closed(const Configuration& c) {
    if (!closed(c)) throw OpenTerm("configuration is not closed");
}

Comp beta(const Value& fn, const Value& arg) {
    if (fn->kind != ValueNode::Kind::Lam) throw OpenTerm("free variable " + fn->name + " in function position");
    return substitute(fn->body, fn->name, arg);
}

StepOutcome step_unchecked(const Configuration& c) {
    const Comp& m = c.comp;
    switch (m->kind) {
    case CompNode::Kind::Unit:
        return {StepOutcome::Kind::Value, c, m->val};
    case CompNode::Kind::Get:
        if (!in_dom(m->loc, c.store)) return {StepOutcome::Kind::Blocked, c, nullptr};
        return {StepOutcome::Kind::Next, {substitute(m->comp, m->name, resolve_lookup(m->loc, c.store)), c.store},
                nullptr};
    case CompNode::Kind::Set:
        return {StepOutcome::Kind::Next, {m->comp, upd(m->loc, m->val, c.store)}, nullptr};
    case CompNode::Kind::Bind: {
        if (m->comp->kind == CompNode::Kind::Unit)
            return {StepOutcome::Kind::Next, {beta(m->val, m->comp->val), c.store}, nullptr};
        StepOutcome inner = step_unchecked({m->comp, c.store});
        if (inner.kind == StepOutcome::Kind::Blocked) return {StepOutcome::Kind::Blocked, c, nullptr};
        return {StepOutcome::Kind::Next, {bind(inner.config.comp, m->val), inner.config.store}, nullptr};
    }
    }
    throw Error("unreachable");
}

}  // namespace

StepOutcome step(const Configuration& c) {
    require_closed(c);
    return step_unchecked(c);
}

std::optional<StepRule> redex_rule(const Configuration& c) {
    const Comp& m = c.comp;
    switch (m->kind) {
    case CompNode::Kind::Unit: return std::nullopt;
    case CompNode::Kind::Get:
        if (!in_dom(m->loc, c.store)) return std::nullopt;
        return StepRule::Get;
    case CompNode::Kind::Set: return StepRule::Set;
    case CompNode::Kind::Bind:
        if (m->comp->kind == CompNode::Kind::Unit) return StepRule::Beta;
        if (is_blocked(c)) return std::nullopt;
        return StepRule::BindContext;
    }
    return std::nullopt;
}

bool is_blocked(const Configuration& c) {
    const Comp& m = c.comp;
    if (m->kind == CompNode::Kind::Get) return !in_dom(m->loc, c.store);
    if (m->kind == CompNode::Kind::Bind) return is_blocked({m->comp, c.store});
    return false;
}

std::size_t default_fuel() {
    if (const char* env = std::getenv("LIMP_FUEL")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultFuel;
}

RunOutcome run(const Configuration& c, std::size_t fuel, std::vector<Configuration>* trace) {
    require_closed(c);
    Configuration cur = c;
    if (trace) trace->push_back(cur);
    for (std::size_t i = 0;; ++i) {
        StepOutcome o = step_unchecked(cur);
        if (o.kind == StepOutcome::Kind::Value) {
            RunOutcome r{RunOutcome::Kind::Converged, o.value, cur.store, cur, i, i};
            return r;
        }
        if (o.kind == StepOutcome::Kind::Blocked) return {RunOutcome::Kind::Blocked, nullptr, nullptr, cur, i, 0};
        if (i == fuel) return {RunOutcome::Kind::FuelExhausted, nullptr, nullptr, cur, i, 0};
        cur = o.config;
        if (trace) trace->push_back(cur);
    }
}

namespace {

struct Big {
    RunOutcome::Kind kind;
    Value value;
    Store store;
    Configuration config;
    std::size_t index = 0;
};

// Charges one unit of fuel at exactly the points where the small-step
// machine would take a step, so exhaustion happens at the same place.
Big eval(Comp m, Store s, std::size_t& fuel) {
    std::size_t index = 0;
    for (;;) {
        switch (m->kind) {
        case CompNode::Kind::Unit:
            return {RunOutcome::Kind::Converged, m->val, s, {m, s}, index};
        case CompNode::Kind::Get:
            if (!in_dom(m->loc, s)) return {RunOutcome::Kind::Blocked, nullptr, nullptr, {m, s}, 0};
            if (fuel == 0) return {RunOutcome::Kind::FuelExhausted, nullptr, nullptr, {m, s}, 0};
            --fuel;
            ++index;
            m = substitute(m->comp, m->name, resolve_lookup(m->loc, s));
            break;
        case CompNode::Kind::Set:
            if (fuel == 0) return {RunOutcome::Kind::FuelExhausted, nullptr, nullptr, {m, s}, 0};
            --fuel;
            ++index;
            s = upd(m->loc, m->val, s);
            m = m->comp;
            break;
        case CompNode::Kind::Bind: {
            Big r = eval(m->comp, s, fuel);
            if (r.kind != RunOutcome::Kind::Converged) {
                r.config.comp = bind(r.config.comp, m->val);
                return r;
            }
            index += r.index;
            if (fuel == 0)
                return {RunOutcome::Kind::FuelExhausted, nullptr, nullptr, {bind(unit(r.value), m->val), r.store}, 0};
            --fuel;
            ++index;
            m = beta(m->val, r.value);
            s = r.store;
            break;
        }
        }
    }
}

}  // namespace

RunOutcome eval_big(const Configuration& c, std::size_t fuel) {
    require_closed(c);
    std::size_t budget = fuel;
    Big b = eval(c.comp, c.store, budget);
    RunOutcome r{b.kind, b.value, b.store, b.config, fuel - budget, b.index};
    if (b.kind != RunOutcome::Kind::Converged) r.index = 0;
    return r;
}

Convergence converges(const Comp& m, std::size_t fuel) {
    RunOutcome r = eval_big({m, emp()}, fuel);
    switch (r.kind) {
    case RunOutcome::Kind::Converged: return {Verdict::True, r};
    case RunOutcome::Kind::Blocked: return {Verdict::False, r};
    case RunOutcome::Kind::FuelExhausted: return {Verdict::Unknown, r};
    }
    return {Verdict::Unknown, r};
}

const char* outcome_name(RunOutcome::Kind k) {
    switch (k) {
    case RunOutcome::Kind::Converged: return "converged";
    case RunOutcome::Kind::Blocked: return "blocked";
    case RunOutcome::Kind::FuelExhausted: return "fuel-exhausted";
    }
    return "?";
}

}  // namespace limp
