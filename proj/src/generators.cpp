#include "limp/generators.hpp"

#include "limp/errors.hpp"

namespace limp {

namespace {

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

std::string fresh(const std::vector<std::string>& scope) { return "x" + std::to_string(scope.size()); }

// Every computation needs size 2 (unit x) or 4 (unit \x. unit x) when closed.
std::size_t min_comp(const std::vector<std::string>& scope) { return scope.empty() ? 4 : 2; }
std::size_t min_value(const std::vector<std::string>& scope) { return scope.empty() ? 3 : 1; }

Comp comp_sized(Rng& rng, std::size_t n, const std::vector<Loc>& locs, std::vector<std::string>& scope);

Value value_sized(Rng& rng, std::size_t n, const std::vector<Loc>& locs, std::vector<std::string>& scope) {
    if (!scope.empty() && (n <= 2 || coin(rng, 0.45))) return var(scope[pick(rng, scope.size())]);
    std::string x = fresh(scope);
    scope.push_back(x);
    Comp body = comp_sized(rng, n < 3 ? 2 : n - 1, locs, scope);
    scope.pop_back();
    return lam(x, body);
}

Comp comp_sized(Rng& rng, std::size_t n, const std::vector<Loc>& locs, std::vector<std::string>& scope) {
    std::size_t lo = min_comp(scope);
    if (n <= lo) return unit(value_sized(rng, min_value(scope), locs, scope));
    std::size_t mv = min_value(scope);
    std::size_t choice = pick(rng, 10);
    if (choice < 2 || n < mv + lo + 1) return unit(value_sized(rng, n - 1, locs, scope));
    if (choice < 5) {  // bind
        std::size_t room = n - 1;
        std::size_t left = lo + pick(rng, room - lo - mv + 1);
        Comp m = comp_sized(rng, left, locs, scope);
        return bind(m, value_sized(rng, room - left, locs, scope));
    }
    Loc l = locs[pick(rng, locs.size())];
    if (choice < 7) {
        std::string x = fresh(scope);
        scope.push_back(x);
        Comp body = comp_sized(rng, n - 1, locs, scope);
        scope.pop_back();
        return get(l, x, body);
    }
    std::size_t room = n - 1;
    std::size_t vs = mv + pick(rng, room - lo - mv + 1);
    Value v = value_sized(rng, vs, locs, scope);
    return set(l, v, comp_sized(rng, room - vs, locs, scope));
}

}  // namespace

Comp random_comp(Rng& rng, const TermShape& shape, const std::vector<std::string>& scope) {
    std::vector<std::string> sc = scope;
    std::size_t lo = min_comp(sc);
    std::size_t n = shape.max_size <= lo ? lo : lo + pick(rng, shape.max_size - lo + 1);
    return comp_sized(rng, n, shape.locs, sc);
}

Value random_value(Rng& rng, const TermShape& shape, const std::vector<std::string>& scope) {
    std::vector<std::string> sc = scope;
    std::size_t lo = min_value(sc);
    std::size_t n = shape.max_size <= lo ? lo : lo + pick(rng, shape.max_size - lo + 1);
    return value_sized(rng, n, shape.locs, sc);
}

Store random_store(Rng& rng, const TermShape& shape, std::size_t max_bindings) {
    TermShape small{std::max<std::size_t>(3, shape.max_size / 3), shape.locs};
    Store s = emp();
    std::size_t n = pick(rng, max_bindings + 1);
    for (std::size_t i = 0; i < n; ++i) {
        Loc l = shape.locs[pick(rng, shape.locs.size())];
        LocSet dom = dom_store(s);
        if (!dom.empty() && coin(rng, 0.2)) {
            std::vector<Loc> ds(dom.begin(), dom.end());
            s = upd(l, lkp(ds[pick(rng, ds.size())], s), s);
        } else {
            s = upd(l, random_value(rng, small), s);
        }
    }
    return s;
}

Configuration random_config(Rng& rng, const TermShape& shape) {
    Comp m = random_comp(rng, shape);
    return {m, random_store(rng, shape)};
}

Comp random_converging(Rng& rng, const TermShape& shape, std::size_t fuel, std::size_t min_steps,
                       std::size_t max_tries) {
    for (std::size_t i = 0; i < max_tries; ++i) {
        Comp m = random_comp(rng, shape);
        Convergence c = converges(m, fuel);
        if (c.verdict == Verdict::True && c.outcome.steps >= min_steps) return m;
    }
    throw EmptyGenerator("no converging term found");
}

// ------------------------------------------------------------------ types

namespace {

Raw type_at(Rng& rng, Sort s, std::size_t depth, const std::vector<Loc>& locs) {
    if (depth == 0 || coin(rng, 0.15)) return r_omega(s);
    if (coin(rng, 0.2)) return r_meet(type_at(rng, s, depth, locs), type_at(rng, s, depth - 1, locs));
    switch (s) {
    case Sort::D: return r_arrow(type_at(rng, Sort::D, depth - 1, locs), type_at(rng, Sort::T, depth - 1, locs));
    case Sort::S: return r_rec(locs[pick(rng, locs.size())], type_at(rng, Sort::D, depth - 1, locs));
    case Sort::C: return r_prod(type_at(rng, Sort::D, depth - 1, locs), type_at(rng, Sort::S, depth - 1, locs));
    case Sort::T: return r_arrow(type_at(rng, Sort::S, depth - 1, locs), type_at(rng, Sort::C, depth - 1, locs));
    }
    return r_omega(s);
}

Raw move(Rng& rng, const Raw& t, const TypeShape& shape, bool up, unsigned fuel);

Raw move_child(Rng& rng, const Raw& t, const TypeShape& shape, bool up, unsigned fuel) {
    switch (t->kind) {
    case RawNode::Kind::Omega: return t;
    case RawNode::Kind::Arrow:
        if (coin(rng)) return r_arrow(move(rng, t->a, shape, !up, fuel), t->b);
        return r_arrow(t->a, move(rng, t->b, shape, up, fuel));
    case RawNode::Kind::Rec: return r_rec(t->loc, move(rng, t->a, shape, up, fuel));
    case RawNode::Kind::Prod:
        if (coin(rng)) return r_prod(move(rng, t->a, shape, up, fuel), t->b);
        return r_prod(t->a, move(rng, t->b, shape, up, fuel));
    case RawNode::Kind::Meet:
        if (coin(rng)) return r_meet(move(rng, t->a, shape, up, fuel), t->b);
        return r_meet(t->a, move(rng, t->b, shape, up, fuel));
    }
    return t;
}

Raw move(Rng& rng, const Raw& t, const TypeShape& shape, bool up, unsigned fuel) {
    if (fuel == 0) return t;
    std::size_t c = pick(rng, 4);
    if (up) {
        if (c == 0) return r_omega(t->sort);
        if (c == 1 && t->kind == RawNode::Kind::Meet) return coin(rng) ? t->a : t->b;
    } else {
        if (c == 0) return r_meet(t, type_at(rng, t->sort, std::max<std::size_t>(1, shape.depth / 2), shape.locs));
        if (c == 1 && t->kind == RawNode::Kind::Omega) return type_at(rng, t->sort, 2, shape.locs);
    }
    return move_child(rng, t, shape, up, fuel - 1);
}

}  // namespace

Raw random_type(Rng& rng, Sort s, const TypeShape& shape) { return type_at(rng, s, shape.depth, shape.locs); }

Raw weaken(Rng& rng, const Raw& t, const TypeShape& shape) { return move(rng, t, shape, true, 8); }
Raw strengthen(Rng& rng, const Raw& t, const TypeShape& shape) { return move(rng, t, shape, false, 8); }

}  // namespace limp
