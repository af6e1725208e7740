#include <doctest.h>

#include <algorithm>

#include "limp/errors.hpp"
#include "limp/generators.hpp"
#include "limp/subtype_oracle.hpp"
#include "limp/text.hpp"
#include "limp/types.hpp"

using namespace limp;

namespace {

Raw R(const std::string& s) { return parse_type(s); }
Type T(const std::string& s) { return normalize_type(R(s)); }

const char* kConv = "wS -> wD x wS";
const char* kD1 = "wD -> wS -> wD x wS";
const char* kD2 = "(wD -> wS -> wD x wS) -> wS -> wD x wS";

bool proved(const Raw& a, const Raw& b, unsigned depth = 200) {
    OracleAnswer o = subtype_oracle(a, b, depth);
    if (o.result == OracleResult::Proved) CHECK(check_subproof(o.proof));
    return o.result == OracleResult::Proved;
}

}  // namespace

TEST_CASE("normal forms of types") {
    Type merged = T(std::string("<l0 : ") + kD1 + "> /\\ <l0 : " + kD2 + ">");
    REQUIRE(merged.s->entries.size() == 1);
    CHECK(merged.key() == T(std::string("<l0 : (") + kD1 + ") /\\ (" + kD2 + ")>").key());

    Type arrow_top = T("wD -> wT");
    CHECK(is_top(arrow_top));
    CHECK(arrow_top.d->arrows.empty());
    CHECK(proved(R("wD"), R("wD -> wT")));
    CHECK(proved(R("wD -> wT"), R("wD")));

    // wC sits strictly above every product
    Type c = T("wC");
    CHECK(is_top(c));
    CHECK_FALSE(type_equiv(c, T("wD x wS")));
    CHECK(subtype(T("wD x wS"), c));
    CHECK_FALSE(subtype(c, T("wD x wS")));
    CHECK(subtype_oracle(R("wC"), R("wD x wS"), 50).result == OracleResult::Refuted);
    CHECK(is_top(T("wS -> wC")));

    CHECK(is_top(T("wS")));
    CHECK(is_top(T("wD /\\ wD")));
}

TEST_CASE("store type domains") {
    CHECK(dom_sigma(T("wS").s).empty());
    CHECK(dom_sigma(T(std::string("<l0 : ") + kD1 + "> /\\ <l1 : wD>").s) == LocSet{0, 1});
    CHECK(dom_sigma(T("<l0 : wD>").s) == LocSet{0});
}

TEST_CASE("subtyping examples") {
    CHECK(subtype(T("wD"), T("wD -> wT")));
    CHECK_FALSE(subtype(T("wS"), T("<l0 : wD>")));
    CHECK(subtype(T("<l0 : wD>"), T("wS")));
    std::string t1 = "wS -> wD x <l0 : wD>", t2 = "<l1 : wD> -> wD x wS";
    std::string d = kD1;
    CHECK(subtype(T("((" + d + ") -> " + t1 + ") /\\ ((" + d + ") -> " + t2 + ")"),
                  T("(" + d + ") -> (" + t1 + ") /\\ (" + t2 + ")")));
    CHECK(subtype(T(kD1), T("wD")));
    CHECK_FALSE(subtype(T("wD"), T(kD1)));
    // contravariant domain
    CHECK(subtype(T("wS -> wD x wS"), T("<l0 : wD> -> wD x wS")));
    CHECK_FALSE(subtype(T("<l0 : wD> -> wD x wS"), T("wS -> wD x wS")));
    CHECK_THROWS_AS(subtype(T("wD"), T("wS")), SortMismatch);
}

TEST_CASE("type equivalence examples") {
    std::string d = kD1, d2 = kD2;
    CHECK(type_equiv(T("((" + d + ") x <l0 : wD>) /\\ ((" + d2 + ") x <l1 : wD>)"),
                     T("((" + d + ") /\\ (" + d2 + ")) x (<l0 : wD> /\\ <l1 : wD>)")));
    for (const char* phi : {kD1, "<l0 : wD>", "wD x <l0 : wD>", kConv}) {
        Type p = T(phi);
        CHECK(type_equiv(meet(p, top_of(p.sort)), p));
    }
    CHECK_FALSE(type_equiv(T("<l0 : wD>"), T("wS")));
    CHECK_THROWS_AS(r_meet(R("wD"), R("wS")), SortMismatch);
}

TEST_CASE("oracle examples") {
    for (const char* phi : {kD1, "<l0 : wD>", kConv, "wD x wS"}) CHECK(proved(R(phi), R(phi), 1));
    CHECK(proved(R(std::string("(") + kD1 + ") /\\ (" + kD2 + ")"), R(kD1), 1));
    for (unsigned depth : {1u, 5u, 40u}) {
        OracleAnswer o = subtype_oracle(R(std::string("<l0 : ") + kD1 + ">"), R(std::string("<l1 : ") + kD1 + ">"), depth);
        CHECK(o.result != OracleResult::Proved);
    }
    CHECK(subtype_oracle(R("<l0 : wD>"), R("<l1 : wD>"), 40).result == OracleResult::Refuted);
}

TEST_CASE("rendering") {
    CHECK(render(T(kConv)) == "wS -> wD x wS");
    CHECK(render(R(kConv)) == "wS -> wD x wS");
    CHECK(render(R(kConv), true) == "ωS → ωD × ωS");
}

TEST_CASE("property: preorder, meets and normal forms") {
    Rng rng(41);
    TypeShape shape{3, {0, 1}};
    for (int i = 0; i < 1500; ++i) {
        Sort s = static_cast<Sort>(i % 4);
        Raw a = random_type(rng, s, shape);
        Raw b = random_type(rng, s, shape);
        Type ta = normalize_type(a), tb = normalize_type(b);
        CHECK(subtype(ta, ta));
        CHECK(normalize_type(to_raw(ta)).key() == ta.key());

        Type m = meet(ta, tb);
        CHECK(subtype(m, ta));
        CHECK(subtype(m, tb));
        CHECK(meet(ta, ta).key() == ta.key());
        CHECK(m.key() == meet(tb, ta).key());
        Type lower = meet(normalize_type(strengthen(rng, a, shape)), normalize_type(strengthen(rng, b, shape)));
        CHECK(subtype(lower, m));
        Raw c = random_type(rng, s, shape);
        Type tc = normalize_type(c);
        if (subtype(tc, ta) && subtype(tc, tb)) CHECK(subtype(tc, m));

        Raw up = weaken(rng, a, shape);
        Raw upup = weaken(rng, up, shape);
        CHECK(subtype(ta, normalize_type(up)));
        CHECK(subtype(ta, normalize_type(upup)));
        if (subtype(ta, tb) && subtype(tb, tc)) CHECK(subtype(ta, tc));

        if (s == Sort::S && subtype(ta, tb)) {
            LocSet da = dom_sigma(ta.s);
            for (Loc l : dom_sigma(tb.s)) CHECK(da.count(l));
        }
    }
}

TEST_CASE("property: normalisation is provably an equivalence") {
    Rng rng(42);
    TypeShape shape{3, {0, 1}};
    for (int i = 0; i < 200; ++i) {
        Raw a = random_type(rng, static_cast<Sort>(i % 4), shape);
        Raw n = to_raw(normalize_type(a));
        CHECK(proved(a, n));
        CHECK(proved(n, a));
    }
}

TEST_CASE("property: maximal witness sets for arrow targets") {
    Rng rng(43);
    TypeShape shape{4, {0, 1}};
    int tested = 0;
    for (int i = 0; i < 2000; ++i) {
        Sort s = i % 2 ? Sort::D : Sort::T;
        Raw a = random_type(rng, s, shape);
        Type ta = normalize_type(a);
        Type tb = normalize_type(weaken(rng, a, shape));
        if (s == Sort::D) {
            for (const auto& [dom, cod] : tb.d->arrows) {
                ++tested;
                REQUIRE(sub_v(ta.d, v_arrow(dom, cod)));
                auto j = jmax_v(ta.d, dom);
                REQUIRE_FALSE(j.empty());
                CType acc = c_top();
                for (auto k : j) {
                    CHECK(sub_v(dom, ta.d->arrows[k].first));
                    acc = c_meet(acc, ta.d->arrows[k].second);
                }
                CHECK(sub_c(acc, cod));
            }
        } else {
            for (const auto& [dom, cod] : tb.t->arrows) {
                ++tested;
                REQUIRE(sub_c(ta.t, c_arrow(dom, cod)));
                auto j = jmax_c(ta.t, dom);
                REQUIRE_FALSE(j.empty());
                KType acc = k_top();
                for (auto k : j) {
                    CHECK(sub_s(dom, ta.t->arrows[k].first));
                    acc = k_meet(acc, ta.t->arrows[k].second);
                }
                CHECK(sub_k(acc, cod));
            }
        }
    }
    CHECK(tested > 500);
}
