#include <doctest.h>

#include <fstream>
#include <sstream>

#include "limp/errors.hpp"
#include "limp/generators.hpp"
#include "limp/realizability.hpp"
#include "limp/text.hpp"
#include "limp/typing.hpp"

using namespace limp;

namespace {

Comp C(const std::string& s) { return parse_comp(s); }
Value V(const std::string& s) { return parse_value(s); }
Raw R(const std::string& s) { return parse_type(s); }

const std::string kConv = "wS -> wD x wS";
const std::string kD1 = "wD -> wS -> wD x wS";

bool contains(const std::vector<Value>& vs, const Value& v) {
    for (auto& w : vs)
        if (alpha_eq(w, v)) return true;
    return false;
}

bool contains(const std::vector<Store>& ss, const Store& s) {
    for (auto& t : ss)
        if (same_store(t, s)) return true;
    return false;
}

}  // namespace

TEST_CASE("store generators") {
    Budget b;
    auto s = gen_stores(R("wS"), b);
    REQUIRE_FALSE(s.empty());
    CHECK(same_store(s.front(), emp()));
    Store want = upd(0, V("\\x. unit x"), emp());
    CHECK(contains(gen_stores(R("<l0 : wD>"), b), want));
    auto typed = gen_stores(R("<l0 : " + kD1 + ">"), b);
    CHECK(contains(typed, want));
    for (auto& t : typed) CHECK(in_dom(0, t));
    for (auto& t : gen_stores(R("<l0 : wD> /\\ <l1 : wD>"), b)) CHECK(dom_store(t).size() >= 2);
}

TEST_CASE("value generators") {
    Budget big{100000, 200, 5};
    auto all = gen_values(R("wD"), big);
    auto expect = enumerate_closed_values(5, {0});
    CHECK(all.size() == expect.size());
    for (auto& v : all) {
        CHECK(closed(v));
        CHECK(size(v) <= 5);
    }
    CHECK(contains(all, V("\\x. unit x")));

    Budget b;
    auto conv = gen_values(R(kD1), b);
    CHECK(contains(conv, V("\\x. unit x")));
    Value loop = lam("x", omega_c());
    CHECK_FALSE(contains(conv, loop));
    CHECK(member(loop, R(kD1), b).verdict == Membership::No);

    CHECK(enumerate_closed_values(2, {0}).empty());
    auto three = enumerate_closed_values(3, {});
    CHECK(three.size() == 1);
}

TEST_CASE("membership examples") {
    Budget b;
    for (const char* v : {"\\x. unit x", "\\x. unit x >>= x", "\\f. get[l0](\\y. unit y)"}) {
        MembershipVerdict m = member(V(v), R("wD"), b);
        CHECK(m.verdict == Membership::Yes);
        CHECK(m.exhaustive);
    }

    MembershipVerdict m = member(omega_c(), R(kConv), b);
    REQUIRE(m.verdict == Membership::No);
    REQUIRE(m.witness);
    REQUIRE(m.witness->inputs.size() == 1);
    CHECK(m.witness->inputs[0].kind == Probe::Kind::Store);
    CHECK(same_store(m.witness->inputs[0].store, emp()));
    CHECK(m.witness->observed == "fuel-exhausted");

    m = member(C("get[l0](\\x. unit x)"), R(kConv), b);
    CHECK(m.verdict == Membership::No);
    m = member(C("get[l0](\\x. unit x)"), R("<l0 : wD> -> wD x wS"), b);
    CHECK(m.verdict != Membership::No);

    CHECK(member(V("\\x. unit x"), R(kD1), b).verdict == Membership::Yes);
    CHECK(member(upd(0, V("\\x. unit x"), emp()), R("<l0 : " + kD1 + ">"), b).verdict == Membership::Yes);
    CHECK(member(emp(), R("<l0 : wD>"), b).verdict == Membership::No);

    Result bottom;
    CHECK(member(bottom, R("wD x wS"), b).verdict == Membership::No);
    CHECK(member(bottom, R("wC"), b).verdict == Membership::Yes);

    CHECK_THROWS_AS(validate(Budget{0, 1, 1}), InputInvalid);
    CHECK_THROWS_AS(member(V("\\x. unit x"), R("wD"), Budget{1, 0, 1}), InputInvalid);
}

TEST_CASE("the falsifier on derivations") {
    Budget b;
    Context g = ctx_extend({}, "x", R(kD1));
    Deriv d = search_typing(g, C("unit x"), R("<l0 : wD> -> (" + kD1 + ") x <l0 : wD>"), 3);
    REQUIRE(d);
    CHECK_FALSE(falsify_compLemma(g, d, b));

    std::ifstream in(std::string(LIMP_GOLDEN_DIR) + "/invariance.deriv");
    std::stringstream ss;
    ss << in.rdbuf();
    Judgment j = parse_derivation(ss.str());
    CHECK_FALSE(falsify_compLemma(j.context, j.root, b));

    Deriv bogus = make_deriv(DRule::Unit, Subject::of(omega_c()), convergence_type(),
                             {d_omega(Subject::of(identity_value()))});
    CHECK_THROWS_AS(falsify_compLemma({}, bogus, b), InputInvalid);
    auto cex = falsify_compLemma({}, bogus, b, 0, false);
    REQUIRE(cex);
    REQUIRE(cex->witness.inputs.size() == 1);
    CHECK(same_store(cex->witness.inputs[0].store, emp()));
    CHECK(alpha_eq(cex->instance, omega_c()));
}

TEST_CASE("property: determinism") {
    Budget b{20, 200, 6};
    Rng rng(61);
    TypeShape shape{2, {0}};
    for (int i = 0; i < 40; ++i) {
        Raw t = random_type(rng, Sort::D, shape);
        Value v = random_value(rng, TermShape{7, {0}});
        MembershipVerdict a = member(v, t, b, 9), c = member(v, t, b, 9);
        CHECK(a.verdict == c.verdict);
        CHECK(a.exhaustive == c.exhaustive);
        CHECK(a.witness.has_value() == c.witness.has_value());
        if (a.witness && c.witness) {
            CHECK(a.witness->observed == c.witness->observed);
            CHECK(a.witness->inputs.size() == c.witness->inputs.size());
        }
    }
}

TEST_CASE("property: generators are sound and membership is monotone") {
    Budget b{16, 200, 6};
    Rng rng(62);
    TypeShape shape{2, {0, 1}};
    for (int i = 0; i < 30; ++i) {
        Raw t = random_type(rng, Sort::D, shape);
        for (auto& v : gen_values(t, b)) CHECK(member(v, t, b).verdict != Membership::No);
        Raw s = random_type(rng, Sort::S, shape);
        for (auto& st : gen_stores(s, b)) CHECK(member(st, s, b).verdict != Membership::No);

        Raw up = weaken(rng, t, shape);
        for (auto& v : enumerate_closed_values(5, {0, 1})) {
            MembershipVerdict m = member(v, t, b);
            if (m.verdict == Membership::Yes && m.exhaustive) CHECK(member(v, up, b).verdict != Membership::No);
        }
    }
}
