#include <doctest.h>

#include <fstream>
#include <sstream>

#include "limp/generators.hpp"
#include "limp/text.hpp"

using namespace limp;

namespace {

std::vector<std::string> golden_lines(const std::string& name) {
    std::ifstream in(std::string(LIMP_GOLDEN_DIR) + "/" + name);
    REQUIRE(in);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("parsing terms") {
    Comp m = parse_comp("unit (\\x. unit x)");
    REQUIRE(m->kind == CompNode::Kind::Unit);
    CHECK(alpha_eq(m, unit(lam("x", unit(var("x"))))));

    Value v = parse_value("\\y. unit y");
    Comp s = parse_comp("set[l0](\\y. unit y). get[l0](\\x. unit x)");
    CHECK(alpha_eq(s, set(0, v, get(0, "x", unit(var("x"))))));
    CHECK(alpha_eq(parse_value("λx. unit x"), parse_value("\\x. unit x")));
    CHECK(alpha_eq(parse_comp("unit x ⟫= f"), parse_comp("unit x >>= f")));

    CHECK_THROWS_AS(parse_lookup("lkp(l0, emp)"), WellFormedness);
    CHECK(same_lookup(parse_lookup("lkp(l0, upd(l0, \\y. unit y, emp))"), lkp(0, upd(0, v, emp()))));
}

TEST_CASE("rendering") {
    CHECK(render(parse_type("wS -> wD x wS")) == "wS -> wD x wS");
    CHECK(render(normalize_type(parse_type("wS -> wD x wS"))) == "wS -> wD x wS");
    Store s = parse_store("upd(l1, \\x. unit x, upd(l0, \\y. unit y, emp))");
    CHECK(render(normal_form(s)) == "upd(l0, \\y. unit y, upd(l1, \\x. unit x, emp))");
    CHECK(render(parse_comp("get[l0](\\x. unit x)"), true) == "get[ℓ0](λx. unit x)");
    CHECK(render_loc(3) == "l3");
}

TEST_CASE("parse errors carry spans") {
    try {
        parse_comp("unit (\\x. unit x");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span.line == 1);
        CHECK(e.span.column == 17);
        CHECK_FALSE(e.expected.empty());
    }
    try {
        parse_type("wS ->\n  <l0 wD>");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span.line == 2);
        CHECK(e.span.column == 7);
    }
    CHECK_THROWS_AS(parse_comp("get[l0](x)"), ParseError);
    CHECK_THROWS_AS(parse_comp("\\x. unit x"), ParseError);
    CHECK_THROWS_AS(parse_value("unit x"), ParseError);
    CHECK_THROWS_AS(parse_type("wD /\\ wS"), SortMismatch);
}

TEST_CASE("golden traces round trip") {
    for (const char* f : {"overriding.trace", "reduction.trace"}) {
        auto lines = golden_lines(f);
        CHECK(lines.size() == 4);
        for (auto& l : lines) {
            Configuration c = parse_config(l);
            CHECK(render(c) == l);
            CHECK(same_config(parse_config(render(c, true)), c));
        }
    }
}

TEST_CASE("property: random syntax round trips") {
    Rng rng(71);
    TermShape shape{25, {0, 1, 2}};
    for (int i = 0; i < 1500; ++i) {
        Configuration c = random_config(rng, shape);
        std::string text = render(c);
        Configuration back = parse_config(text);
        CHECK(same_config(back, c));
        CHECK(render(back) == text);
        CHECK(same_config(parse_config(render(c, true)), c));

        Comp m = random_comp(rng, shape, {"x", "y"});
        CHECK(alpha_eq(parse_comp(render(m)), m));
        CHECK(render(parse_comp(render(m))) == render(m));

        Store s = random_store(rng, shape, 4);
        CHECK(same_store(parse_store(render(s)), s));

        Raw t = random_type(rng, static_cast<Sort>(i % 4), TypeShape{4, {0, 1}});
        CHECK(raw_equal(parse_type(render(t)), t));
        CHECK(raw_equal(parse_type(render(t, true)), t));
    }
}
