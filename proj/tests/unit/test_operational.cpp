#include <doctest.h>

#include <cstdlib>

#include "limp/errors.hpp"
#include "limp/generators.hpp"
#include "limp/operational.hpp"
#include "limp/text.hpp"

using namespace limp;

namespace {

Comp C(const std::string& s) { return parse_comp(s); }
Value V(const std::string& s) { return parse_value(s); }
Configuration K(const std::string& s) { return parse_config(s); }

}  // namespace

TEST_CASE("single steps") {
    Store s = upd(3, V("\\q. unit q"), emp());
    StepOutcome o = step({omega_c(), s});
    REQUIRE(o.kind == StepOutcome::Kind::Next);
    CHECK(same_config(o.config, {omega_c(), s}));
    CHECK(redex_rule({omega_c(), s}) == StepRule::Beta);

    Value v = V("\\y. unit y"), w = V("\\z. unit z >>= z");
    Comp m = set(0, w, set(0, v, C("get[l0](\\x. unit x)")));
    o = step({m, s});
    REQUIRE(o.kind == StepOutcome::Kind::Next);
    CHECK(same_config(o.config, {set(0, v, C("get[l0](\\x. unit x)")), upd(0, w, s)}));

    o = step({C("get[l0](\\x. unit x)"), emp()});
    CHECK(o.kind == StepOutcome::Kind::Blocked);
    CHECK_FALSE(redex_rule({C("get[l0](\\x. unit x)"), emp()}));

    o = step({unit(v), emp()});
    REQUIRE(o.kind == StepOutcome::Kind::Value);
    CHECK(alpha_eq(o.value, v));

    CHECK_THROWS_AS(step({C("unit x"), emp()}), OpenTerm);
}

TEST_CASE("blocked configurations") {
    CHECK(is_blocked({C("get[l0](\\x. unit x)"), emp()}));
    CHECK(is_blocked({C("get[l0](\\x. unit x) >>= \\y. unit y"), emp()}));
    CHECK_FALSE(is_blocked({C("unit (\\x. unit x)"), emp()}));
    CHECK_FALSE(is_blocked({C("get[l0](\\x. unit x)"), upd(0, identity_value(), emp())}));
}

TEST_CASE("runs") {
    std::vector<Configuration> trace;
    Configuration start{C("set[l0](\\z. unit z >>= z). set[l0](\\y. unit y). get[l0](\\x. unit x)"), emp()};
    RunOutcome r = run(start, 10, &trace);
    REQUIRE(r.kind == RunOutcome::Kind::Converged);
    CHECK(r.steps == 3);
    REQUIRE(trace.size() == 4);
    CHECK(same_config(trace[0], start));
    CHECK(same_config(trace[1], K("(set[l0](\\y. unit y). get[l0](\\x. unit x), upd(l0, \\z. unit z >>= z, emp))")));
    CHECK(same_config(trace[2],
                      K("(get[l0](\\x. unit x), upd(l0, \\y. unit y, upd(l0, \\z. unit z >>= z, emp)))")));
    CHECK(same_config(trace[3],
                      K("(unit (\\y. unit y), upd(l0, \\y. unit y, upd(l0, \\z. unit z >>= z, emp)))")));
    CHECK(alpha_eq(r.value, V("\\y. unit y")));
    CHECK(same_store(r.store, trace[3].store));

    // (set(V). unit W) ; get(\x. N) saves V on the way
    trace.clear();
    Value v = V("\\a. unit a"), w = V("\\b. unit b >>= b");
    Comp n = C("unit x >>= x");
    Configuration c{seq(set(1, v, unit(w)), get(1, "x", n)), upd(0, w, emp())};
    r = run(c, 10, &trace);
    REQUIRE(trace.size() >= 4);
    CHECK(same_config(trace[3], {substitute(n, "x", v), upd(1, v, c.store)}));

    r = run({omega_c(), emp()}, 100);
    CHECK(r.kind == RunOutcome::Kind::FuelExhausted);
    CHECK(r.steps == 100);
    CHECK(same_config(r.config, {omega_c(), emp()}));

    r = run({C("get[l0](\\x. unit x)"), emp()}, 100);
    CHECK(r.kind == RunOutcome::Kind::Blocked);
    CHECK(r.steps == 0);
}

TEST_CASE("big-step evaluation") {
    Value v = V("\\x. unit x");
    RunOutcome r = eval_big({unit(v), upd(0, v, emp())}, 10);
    REQUIRE(r.kind == RunOutcome::Kind::Converged);
    CHECK(r.index == 0);
    CHECK(same_store(r.store, upd(0, v, emp())));

    r = eval_big({C("set[l0](\\x. unit x). get[l0](\\x. unit x)"), emp()}, 10);
    REQUIRE(r.kind == RunOutcome::Kind::Converged);
    CHECK(r.index == 2);
    CHECK(alpha_eq(r.value, v));
    CHECK(same_store(r.store, upd(0, v, emp())));

    // the bind rule charges left, right and one more
    r = eval_big({bind(set(0, v, unit(v)), v), emp()}, 10);
    REQUIRE(r.kind == RunOutcome::Kind::Converged);
    CHECK(r.index == 2);

    CHECK(eval_big({C("get[l0](\\x. unit x)"), emp()}, 10).kind == RunOutcome::Kind::Blocked);
    CHECK(eval_big({omega_c(), emp()}, 50).kind == RunOutcome::Kind::FuelExhausted);
}

TEST_CASE("convergence from the empty store") {
    CHECK(converges(C("set[l0](\\x. unit x). get[l0](\\x. unit x)"), 100).verdict == Verdict::True);
    CHECK(converges(C("get[l0](\\x. unit x)"), 100).verdict == Verdict::False);
    CHECK(converges(C("unit (\\x. unit x)"), 100).verdict == Verdict::True);
    CHECK(converges(omega_c(), 100).verdict == Verdict::Unknown);
}

TEST_CASE("default fuel") {
    unsetenv("LIMP_FUEL");
    CHECK(default_fuel() == kDefaultFuel);
    setenv("LIMP_FUEL", "77", 1);
    CHECK(default_fuel() == 77);
    setenv("LIMP_FUEL", "junk", 1);
    CHECK(default_fuel() == kDefaultFuel);
    unsetenv("LIMP_FUEL");
}

TEST_CASE("property: determinism, trichotomy and closedness") {
    Rng rng(31);
    TermShape shape{20, {0, 1}};
    for (int i = 0; i < 800; ++i) {
        Configuration c = random_config(rng, shape);
        std::vector<Configuration> t1, t2;
        RunOutcome a = run(c, 200, &t1);
        RunOutcome b = run(c, 200, &t2);
        CHECK(a.kind == b.kind);
        REQUIRE(t1.size() == t2.size());
        for (std::size_t k = 0; k < t1.size(); ++k) {
            CHECK(same_config(t1[k], t2[k]));
            CHECK(closed(t1[k]));
        }
        CHECK(a.steps + 1 == t1.size());
        CHECK(a.steps <= 200);
        switch (a.kind) {
        case RunOutcome::Kind::Converged: CHECK(t1.back().comp->kind == CompNode::Kind::Unit); break;
        case RunOutcome::Kind::Blocked: CHECK(is_blocked(t1.back())); break;
        case RunOutcome::Kind::FuelExhausted:
            CHECK(a.steps == 200);
            CHECK(step(t1.back()).kind == StepOutcome::Kind::Next);
            break;
        }
        // each step is the unique successor
        for (std::size_t k = 0; k + 1 < t1.size(); ++k) CHECK(same_config(step(t1[k]).config, t1[k + 1]));
    }
}

TEST_CASE("property: evaluation inside a bind context") {
    Rng rng(32);
    TermShape shape{18, {0, 1}};
    Value f = V("\\r. unit r");
    for (int i = 0; i < 500; ++i) {
        Configuration c = random_config(rng, shape);
        std::vector<Configuration> inner, outer;
        run(c, 100, &inner);
        run({bind(c.comp, f), c.store}, 200, &outer);
        REQUIRE(outer.size() >= inner.size());
        for (std::size_t k = 0; k < inner.size(); ++k)
            CHECK(same_config(outer[k], {bind(inner[k].comp, f), inner[k].store}));
    }
}

TEST_CASE("property: big-step and small-step agree") {
    Rng rng(33);
    TermShape shape{20, {0, 1, 2}};
    for (int i = 0; i < 800; ++i) {
        Configuration c = random_config(rng, shape);
        RunOutcome a = run(c, 300), b = eval_big(c, 300);
        REQUIRE(a.kind == b.kind);
        CHECK(a.steps == b.steps);
        if (a.kind == RunOutcome::Kind::Converged) {
            CHECK(alpha_eq(a.value, b.value));
            CHECK(store_eq(a.store, b.store));
        }
        if (a.kind == RunOutcome::Kind::Blocked) CHECK(same_config(a.config, b.config));
    }
}
