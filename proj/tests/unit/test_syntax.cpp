#include <doctest.h>

#include <functional>
#include <map>
#include <vector>

#include "limp/generators.hpp"
#include "limp/syntax.hpp"
#include "limp/text.hpp"

using namespace limp;

namespace {

// Independent de Bruijn rendering: bound variables become their binder
// distance, free ones keep their name.
struct DeBruijn {
    std::vector<std::string> env;

    std::string var_of(const std::string& x) const {
        for (std::size_t i = env.size(); i-- > 0;)
            if (env[i] == x) return "#" + std::to_string(env.size() - 1 - i);
        return "$" + x;
    }
    std::string v(const Value& w) {
        if (w->kind == ValueNode::Kind::Var) return var_of(w->name);
        env.push_back(w->name);
        std::string r = "L(" + c(w->body) + ")";
        env.pop_back();
        return r;
    }
    std::string c(const Comp& m) {
        switch (m->kind) {
        case CompNode::Kind::Unit: return "U(" + v(m->val) + ")";
        case CompNode::Kind::Bind: return "B(" + c(m->comp) + "," + v(m->val) + ")";
        case CompNode::Kind::Set: return "S" + std::to_string(m->loc) + "(" + v(m->val) + "," + c(m->comp) + ")";
        case CompNode::Kind::Get: {
            env.push_back(m->name);
            std::string r = "G" + std::to_string(m->loc) + "(" + c(m->comp) + ")";
            env.pop_back();
            return r;
        }
        }
        return "?";
    }
};

std::string db(const Comp& m) { return DeBruijn{}.c(m); }
std::string db(const Value& v) { return DeBruijn{}.v(v); }

// Free variables by brute force: every occurrence, filtered by the binders
// on its path.
void occurrences(const Comp& m, std::vector<std::string> bound, VarSet& out);
void occurrences(const Value& v, std::vector<std::string> bound, VarSet& out) {
    if (v->kind == ValueNode::Kind::Var) {
        bool b = false;
        for (auto& n : bound) b = b || n == v->name;
        if (!b) out.insert(v->name);
        return;
    }
    bound.push_back(v->name);
    occurrences(v->body, bound, out);
}
void occurrences(const Comp& m, std::vector<std::string> bound, VarSet& out) {
    switch (m->kind) {
    case CompNode::Kind::Unit: occurrences(m->val, bound, out); return;
    case CompNode::Kind::Bind:
        occurrences(m->comp, bound, out);
        occurrences(m->val, bound, out);
        return;
    case CompNode::Kind::Set:
        occurrences(m->val, bound, out);
        occurrences(m->comp, bound, out);
        return;
    case CompNode::Kind::Get:
        bound.push_back(m->name);
        occurrences(m->comp, bound, out);
        return;
    }
}
VarSet naive_fv(const Comp& m) {
    VarSet out;
    occurrences(m, {}, out);
    return out;
}

// Renames every binder to b0, b1, ... so that no capture can happen, then
// substitutes textually.
struct Renamer {
    int next = 0;
    std::map<std::string, std::string> map;

    Value v(const Value& w) {
        if (w->kind == ValueNode::Kind::Var) {
            auto it = map.find(w->name);
            return var(it == map.end() ? w->name : it->second);
        }
        std::string b = "b" + std::to_string(next++);
        auto saved = map;
        map[w->name] = b;
        Comp body = c(w->body);
        map = saved;
        return lam(b, body);
    }
    Comp c(const Comp& m) {
        switch (m->kind) {
        case CompNode::Kind::Unit: return unit(v(m->val));
        case CompNode::Kind::Bind: {
            Comp a = c(m->comp);
            return bind(a, v(m->val));
        }
        case CompNode::Kind::Set: {
            Value a = v(m->val);
            return set(m->loc, a, c(m->comp));
        }
        case CompNode::Kind::Get: {
            std::string b = "b" + std::to_string(next++);
            auto saved = map;
            map[m->name] = b;
            Comp body = c(m->comp);
            map = saved;
            return get(m->loc, b, body);
        }
        }
        return m;
    }
};

Comp textual(const Comp& m, const std::string& x, const Value& r);
Value textual(const Value& w, const std::string& x, const Value& r) {
    if (w->kind == ValueNode::Kind::Var) return w->name == x ? r : w;
    return lam(w->name, textual(w->body, x, r));
}
Comp textual(const Comp& m, const std::string& x, const Value& r) {
    switch (m->kind) {
    case CompNode::Kind::Unit: return unit(textual(m->val, x, r));
    case CompNode::Kind::Bind: return bind(textual(m->comp, x, r), textual(m->val, x, r));
    case CompNode::Kind::Set: return set(m->loc, textual(m->val, x, r), textual(m->comp, x, r));
    case CompNode::Kind::Get: return get(m->loc, m->name, textual(m->comp, x, r));
    }
    return m;
}

Comp C(const std::string& s) { return parse_comp(s); }
Value V(const std::string& s) { return parse_value(s); }

const std::vector<std::string> kScope{"x", "y", "z"};

}  // namespace

TEST_CASE("free variables") {
    CHECK(free_vars(C("unit x")) == VarSet{"x"});
    CHECK(free_vars(V("\\x. unit x")).empty());
    Comp m = C("get[l0](\\x. unit y >>= x)");
    CHECK(free_vars(m) == VarSet{"y"});
    CHECK(naive_fv(m) == VarSet{"y"});
    CHECK(is_free("y", m));
    CHECK_FALSE(is_free("x", m));
    CHECK(closed(omega_c()));
    CHECK_FALSE(closed(m));
}

TEST_CASE("substitution examples") {
    Value w = V("\\q. unit q");
    CHECK(alpha_eq(substitute(C("unit x"), "x", w), unit(w)));

    Value id = identity_value();
    Value same = substitute(id, "x", w);
    CHECK(same == id);

    Comp r = substitute(C("unit (\\y. unit x)"), "x", var("y"));
    const Value& f = r->val;
    REQUIRE(f->kind == ValueNode::Kind::Lam);
    CHECK(f->name != "y");
    CHECK(f->body->val->kind == ValueNode::Kind::Var);
    CHECK(f->body->val->name == "y");
    CHECK(db(r) == db(C("unit (\\z. unit y)")));
    CHECK(alpha_eq(r, C("unit (\\z. unit y)")));
}

TEST_CASE("alpha equivalence examples") {
    CHECK(alpha_eq(V("\\x. unit x"), V("\\y. unit y")));
    CHECK_FALSE(alpha_eq(V("\\x. unit x"), V("\\x. unit z")));
    CHECK_FALSE(alpha_eq(C("get[l0](\\x. unit x)"), C("get[l1](\\x. unit x)")));
    CHECK_FALSE(alpha_eq(V("\\x. unit y"), V("\\y. unit y")));
}

TEST_CASE("surface encodings") {
    Comp m = C("unit a");
    Comp n = C("unit b");
    CHECK(alpha_eq(let_in("x", m, n), bind(m, lam("x", n))));
    Value v = var("f"), w = var("g");
    CHECK(alpha_eq(app_value(v, w), bind(unit(w), v)));

    Comp s = seq(m, C("unit y"));
    REQUIRE(s->kind == CompNode::Kind::Bind);
    CHECK(alpha_eq(s->comp, m));
    CHECK_FALSE(is_free(s->val->name, C("unit y")));
    // the fresh binder of a sequence never captures the continuation
    Comp t = seq(m, unit(var(s->val->name)));
    CHECK(free_vars(t).count(s->val->name));

    CHECK(alpha_eq(C("let x = unit a in unit x"), bind(C("unit a"), V("\\x. unit x"))));
    CHECK(alpha_eq(C("f g"), bind(unit(var("g")), var("f"))));
    CHECK(alpha_eq(C("unit a; unit b"), seq(m, n)));

    Comp o = omega_c();
    Value d = V("\\x. unit x >>= x");
    CHECK(alpha_eq(o, bind(unit(d), d)));
}

TEST_CASE("fresh names") {
    CHECK(fresh_variant("x", {"y"}) == "x");
    CHECK(fresh_variant("x", {"x"}) != "x");
    CHECK(fresh_prime("x", {}) != "x");
    std::string f = fresh_prime("x", {"x'", "x''"});
    CHECK(f != "x'");
    CHECK(f != "x''");
}

TEST_CASE("property: free variables agree with the occurrence walker") {
    Rng rng(11);
    TermShape shape{25, {0, 1}};
    for (int i = 0; i < 2000; ++i) {
        Comp m = random_comp(rng, shape, kScope);
        CHECK(free_vars(m) == naive_fv(m));
    }
}

TEST_CASE("property: substitution against capture-free renaming") {
    Rng rng(12);
    TermShape shape{20, {0, 1}};
    for (int i = 0; i < 2000; ++i) {
        Comp m = random_comp(rng, shape, kScope);
        Value v = random_value(rng, TermShape{8, {0}}, kScope);
        std::string x = kScope[i % kScope.size()];
        Comp got = substitute(m, x, v);
        Comp want = textual(Renamer{}.c(m), x, v);
        CHECK(db(got) == db(want));
        CHECK(alpha_eq(got, want));

        VarSet fv = free_vars(m);
        VarSet expect = fv;
        expect.erase(x);
        if (fv.count(x))
            for (auto& y : free_vars(v)) expect.insert(y);
        CHECK(free_vars(got) == expect);
    }
}

TEST_CASE("property: alpha equivalence and nameless keys match de Bruijn") {
    Rng rng(13);
    TermShape shape{15, {0, 1}};
    std::vector<Comp> terms;
    for (int i = 0; i < 300; ++i) terms.push_back(random_comp(rng, shape, {"x", "y"}));
    for (const auto& m : terms) {
        Comp r = Renamer{}.c(m);
        CHECK(alpha_eq(m, r));
        CHECK(nameless_key(m) == nameless_key(r));
    }
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
        const Comp& a = terms[i];
        const Comp& b = terms[i + 1];
        CHECK(alpha_eq(a, b) == (db(a) == db(b)));
        CHECK((nameless_key(a) == nameless_key(b)) == (db(a) == db(b)));
    }
}

TEST_CASE("property: alpha-equivalent inputs give alpha-equivalent encodings") {
    Rng rng(14);
    TermShape shape{12, {0}};
    for (int i = 0; i < 300; ++i) {
        Comp m = random_comp(rng, shape, {"x"});
        Comp n = random_comp(rng, shape, {"x"});
        Comp m2 = Renamer{}.c(m), n2 = Renamer{}.c(n);
        CHECK(alpha_eq(seq(m, n), seq(m2, n2)));
        CHECK(alpha_eq(app_comp(m, n), app_comp(m2, n2)));
        CHECK(alpha_eq(let_in("x", m, n), let_in("x", m2, n2)));
    }
}
