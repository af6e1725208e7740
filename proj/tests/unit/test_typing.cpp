#include <doctest.h>

#include <fstream>
#include <functional>
#include <sstream>

#include "limp/errors.hpp"
#include "limp/generators.hpp"
#include "limp/text.hpp"
#include "limp/typing.hpp"

using namespace limp;

namespace {

Comp C(const std::string& s) { return parse_comp(s); }
Value V(const std::string& s) { return parse_value(s); }
Raw R(const std::string& s) { return parse_type(s); }

const std::string kConv = "wS -> wD x wS";
const std::string kD1 = "wD -> wS -> wD x wS";
const std::string kD2 = "(wD -> wS -> wD x wS) -> wS -> wD x wS";

Value id() { return V("\\y. unit y"); }
Value dup() { return V("\\z. unit z >>= z"); }

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(LIMP_GOLDEN_DIR) + "/" + name);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ok(const Context& g, const Deriv& d) {
    CheckResult r = check_derivation(g, d);
    if (!r.ok) MESSAGE(r.describe());
    return r.ok;
}

bool equiv(const Deriv& d, const std::string& t) { return type_equiv(d->canon, normalize_type(R(t))); }

std::vector<Deriv> nodes(const Deriv& d, DRule rule) {
    std::vector<Deriv> out;
    std::function<void(const Deriv&)> walk = [&](const Deriv& n) {
        if (n->rule == rule) out.push_back(n);
        for (auto& p : n->premises) walk(p);
    };
    walk(d);
    return out;
}

Context ctx(const std::string& x, const std::string& t) { return ctx_extend({}, x, R(t)); }

Deriv conf_at(const Configuration& c, const std::string& tau, const std::string& sigma, unsigned depth = 6) {
    Deriv dm = search_typing({}, c.comp, R(tau), depth);
    REQUIRE(dm);
    Deriv ds = type_store_target(c.store, R(sigma), [](Loc, const Value& v, const Raw& d) {
        return search_value({}, v, d, 6);
    });
    REQUIRE(ds);
    return d_conf(dm, coerce(ds, dm->type->a));
}

}  // namespace

TEST_CASE("golden derivations check") {
    for (const char* f : {"invariance.deriv", "set_get.deriv"}) {
        Judgment j = parse_derivation(slurp(f));
        CHECK(ok(j.context, j.root));
        std::string text = render_derivation(j);
        Judgment again = parse_derivation(text);
        CHECK(render_derivation(again) == text);
    }
}

TEST_CASE("checker rejections carry a reason") {
    Value v = id();
    Deriv bad_unit = make_deriv(DRule::Unit, Subject::of(unit(v)), R("<l0 : wD> -> wD x wS"), {d_omega(Subject::of(v))});
    CheckResult r = check_derivation({}, bad_unit);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == CheckReason::ShapeMismatch);

    Comp body = unit(v);
    Deriv cont = make_deriv(DRule::Unit, Subject::of(body), R("<l0 : wD> -> wD x <l0 : wD>"), {d_omega(Subject::of(v))});
    Comp m = set(0, v, body);
    Deriv good = make_deriv(DRule::Set, Subject::of(m), R("wS -> wD x <l0 : wD>"), {d_omega(Subject::of(v)), cont});
    CHECK(ok({}, good));
    Deriv bad_set = make_deriv(DRule::Set, Subject::of(m), R("<l0 : wD> -> wD x <l0 : wD>"),
                               {d_omega(Subject::of(v)), cont});
    r = check_derivation({}, bad_set);
    CHECK_FALSE(r.ok);
    CHECK(r.reason == CheckReason::SideConditionFails);

    Deriv free_var = make_deriv(DRule::Var, Subject::of(var("x")), R("wD"));
    r = check_derivation({}, free_var);
    CHECK(r.reason == CheckReason::ContextMismatch);
    CHECK(ok(ctx("x", "wD"), free_var));
    r = check_derivation(ctx("x", kD1), free_var);
    CHECK(r.reason == CheckReason::ContextMismatch);

    Deriv up = make_deriv(DRule::Sub, Subject::of(v), R(kD1), {d_omega(Subject::of(v))});
    r = check_derivation({}, up);
    CHECK(r.reason == CheckReason::SubtypeFails);

    // failure paths point at the offending premise
    Deriv wrapped = make_deriv(DRule::Meet, Subject::of(m), R("wS -> wD x <l0 : wD>"), {good, bad_set});
    r = check_derivation({}, wrapped);
    CHECK_FALSE(r.ok);
}

TEST_CASE("store typings") {
    Deriv e = type_store(emp());
    CHECK(e->rule == DRule::Omega);
    CHECK(is_top(e->canon));
    CHECK(ok({}, e));

    auto typer = [](Loc, const Value& v, const Raw& d) { return search_value({}, v, d, 6); };
    Store s = upd(1, id(), upd(2, dup(), emp()));
    std::string target = "<l1 : " + kD1 + "> /\\ <l2 : wD>";
    Deriv d = type_store_target(s, R(target), typer);
    REQUIRE(d);
    CHECK(ok({}, d));
    CHECK(equiv(d, target));

    // the overriding update is typed through the outer binding alone
    Store over = upd(0, id(), upd(0, dup(), emp()));
    d = type_store_target(over, R("<l0 : " + kD1 + ">"), typer);
    REQUIRE(d);
    CHECK(ok({}, d));
    CHECK(equiv(d, "<l0 : " + kD1 + ">"));
    bool outer = false;
    for (auto& n : nodes(d, DRule::UpdA)) outer = outer || same_store(n->subject.store, over);
    CHECK(outer);
    CHECK(nodes(d, DRule::UpdB).empty());

    CHECK_FALSE(type_store_target(over, R("<l1 : wD>"), typer));

    Deriv all = type_store(s);
    CHECK(ok({}, all));
    CHECK(dom_sigma(all->canon.s) == LocSet{1, 2});
}

TEST_CASE("substitution into derivations") {
    Context g = ctx("x", kD1);
    Deriv dm = search_typing(g, C("unit x"), R("<l0 : wD> -> (" + kD1 + ") x <l0 : wD>"), 3);
    REQUIRE(dm);
    Deriv dv = search_value({}, id(), R(kD1), 4);
    REQUIRE(dv);
    Deriv d = subst_derivation({}, "x", dm, dv);
    CHECK(ok({}, d));
    CHECK(alpha_eq(d->subject.comp, unit(id())));
    CHECK(type_equiv(d->canon, dm->canon));

    Comp closed_m = C("unit (\\q. unit q)");
    Deriv dm2 = search_typing(g, closed_m, R(kConv), 3);
    REQUIRE(dm2);
    d = subst_derivation({}, "x", dm2, dv);
    CHECK(ok({}, d));
    CHECK(alpha_eq(d->subject.comp, closed_m));

    Context g2 = ctx("x", "(" + kD1 + ") /\\ (" + kD2 + ")");
    Deriv dm3 = search_typing(g2, C("unit x >>= x"), R(kConv), 6);
    REQUIRE(dm3);
    Deriv dv3 = search_value({}, id(), R("(" + kD1 + ") /\\ (" + kD2 + ")"), 6);
    REQUIRE(dv3);
    d = subst_derivation({}, "x", dm3, dv3);
    CHECK(ok({}, d));
    CHECK(alpha_eq(d->subject.comp, bind(unit(id()), id())));
    CHECK(equiv(d, kConv));

    Deriv broken = make_deriv(DRule::Var, Subject::of(var("x")), R(kD2));
    CHECK_THROWS_AS(subst_derivation({}, "x", dm, broken), InputInvalid);
}

TEST_CASE("expansion of derivations") {
    Value v = id();
    Deriv d = search_typing({}, unit(v), R("wS -> (" + kD1 + ") x wS"), 4);
    REQUIRE(d);
    Expansion e = expand_derivation({}, d, C("unit x"), "x", v);
    CHECK(type_equiv(normalize_type(e.delta), normalize_type(R(kD1))));
    CHECK(ok({}, e.value));
    Context g = ctx_extend({}, "x", e.delta);
    CHECK(ok(g, e.comp));
    CHECK_FALSE(nodes(e.comp, DRule::Var).empty());
    Deriv back = subst_derivation({}, "x", e.comp, e.value);
    CHECK(type_equiv(back->canon, d->canon));

    Comp closed_m = C("unit (\\q. unit q)");
    Deriv dc = search_typing({}, closed_m, R(kConv), 3);
    REQUIRE(dc);
    e = expand_derivation({}, dc, closed_m, "x", v);
    CHECK(is_top(normalize_type(e.delta)));
    CHECK(e.value->rule == DRule::Omega);
    CHECK(ok(ctx_extend({}, "x", e.delta), e.comp));

    Comp two = C("unit x >>= x");
    Deriv dt = search_typing({}, bind(unit(v), v), R(kConv), 6);
    REQUIRE(dt);
    e = expand_derivation({}, dt, two, "x", v);
    CHECK(ok({}, e.value));
    CHECK(ok(ctx_extend({}, "x", e.delta), e.comp));
    back = subst_derivation({}, "x", e.comp, e.value);
    CHECK(ok({}, back));
    CHECK(type_equiv(back->canon, dt->canon));
    for (auto& n : nodes(e.comp, DRule::Var)) CHECK(subtype(normalize_type(e.delta), n->canon));

    CHECK_THROWS_AS(expand_derivation({}, d, C("unit (\\w. unit w >>= w)"), "x", v), DecompositionMismatch);
}

TEST_CASE("preservation along steps") {
    Configuration c{C("set[l0](\\z. unit z >>= z). set[l0](\\y. unit y). get[l0](\\x. unit x)"), emp()};
    Configuration c1 = step(c).config;

    Deriv top = d_omega(Subject::of(c));
    Deriv p = preserve_step({}, top, c, c1);
    CHECK(p->rule == DRule::Omega);
    CHECK(ok({}, p));

    std::string t = "wS -> (" + kD1 + ") x <l0 : " + kD1 + ">";
    Deriv d = conf_at(c, t, "wS", 8);
    CHECK(ok({}, d));
    Configuration cur = c;
    for (int i = 0; i < 3; ++i) {
        Configuration next = step(cur).config;
        Deriv n = preserve_step({}, d, cur, next);
        CHECK(ok({}, n));
        CHECK(type_equiv(n->canon, d->canon));
        CHECK(same_subject(n->subject, Subject::of(next)));
        d = n;
        cur = next;
    }

    Value v = id();
    Configuration b{bind(unit(v), V("\\x. unit x")), upd(0, dup(), emp())};
    std::string sig = "<l0 : wD>";
    Deriv db = conf_at(b, sig + " -> (" + kD1 + ") x " + sig, sig);
    Deriv after = preserve_step({}, db, b, step(b).config);
    CHECK(ok({}, after));
    CHECK(alpha_eq(after->subject.comp, unit(v)));
    CHECK(type_equiv(after->canon, db->canon));

    CHECK_THROWS_AS(preserve_step({}, db, b, b), NotAStep);
}

TEST_CASE("expansion along steps") {
    Value v = id();
    Configuration from{set(0, v, unit(v)), emp()};
    Configuration to = step(from).config;
    Deriv seed = d_conf(search_typing({}, unit(v), R(kConv), 3), coerce(type_store(to.store), R("wS")));
    REQUIRE(ok({}, seed));
    Deriv e = expand_step({}, seed, from, to);
    CHECK(ok({}, e));
    CHECK(same_subject(e->subject, Subject::of(from)));
    CHECK(equiv(e, "wD x wS"));
    auto sets = nodes(e, DRule::Set);
    REQUIRE_FALSE(sets.empty());
    CHECK(equiv(sets.front(), kConv));

    Configuration g{C("get[l0](\\x. unit x)"), upd(0, v, emp())};
    Configuration g1 = step(g).config;
    Deriv gs = conf_at(g1, "<l0 : wD> -> (" + kD1 + ") x <l0 : wD>", "<l0 : " + kD1 + ">");
    REQUIRE(ok({}, gs));
    Deriv ge = expand_step({}, gs, g, g1);
    CHECK(ok({}, ge));
    auto gets = nodes(ge, DRule::Get);
    REQUIRE_FALSE(gets.empty());
    const Raw& gt = gets.front()->type;
    REQUIRE(gt->kind == RawNode::Kind::Arrow);
    Type dom = normalize_type(gt->a);
    REQUIRE(dom.s->entries.count(0));
    CHECK(subtype(Type::of(dom.s->entries.at(0)), normalize_type(R(kD1))));
    CHECK(type_equiv(ge->canon, gs->canon));

    Value w = dup();
    Configuration u{bind(unit(v), lam("x", unit(w))), emp()};
    Configuration u1 = step(u).config;
    Deriv us = d_conf(search_typing({}, unit(w), R(kConv), 3), type_store(emp()));
    Deriv ue = expand_step({}, us, u, u1);
    CHECK(ok({}, ue));
    bool found = false;
    for (auto& n : nodes(ue, DRule::Lam))
        if (n->subject.value->name == "x") {
            found = true;
            CHECK(is_top(normalize_type(n->type->a)));
        }
    CHECK(found);

    CHECK_THROWS_AS(expand_step({}, us, u1, u), NotAStep);
}

TEST_CASE("convergence certificates") {
    CertifyResult r = certify_convergence(C("set[l0](\\x. unit x). get[l0](\\y. unit y)"), 100);
    REQUIRE(r.ok);
    CHECK(ok({}, r.cert.term));
    CHECK(ok({}, r.cert.config));
    CHECK(raw_equal(r.cert.term->type, convergence_type()));
    CHECK(r.cert.trace.size() == 3);

    r = certify_convergence(C("unit (\\x. unit x)"), 100);
    REQUIRE(r.ok);
    CHECK(ok({}, r.cert.term));
    CHECK(nodes(r.cert.term, DRule::Unit).size() == 1);

    r = certify_convergence(omega_c(), 100);
    CHECK_FALSE(r.ok);
    CHECK(r.outcome.kind == RunOutcome::Kind::FuelExhausted);
    r = certify_convergence(C("get[l0](\\x. unit x)"), 100);
    CHECK_FALSE(r.ok);
    CHECK(r.outcome.kind == RunOutcome::Kind::Blocked);
}

TEST_CASE("bounded search") {
    Deriv d = search_typing({}, unit(id()), convergence_type(), 3);
    REQUIRE(d);
    CHECK(ok({}, d));
    std::string delta = kD1, sigma = "<l0 : wD>";
    d = search_typing(ctx("x", delta), C("unit x"), R(sigma + " -> (" + delta + ") x " + sigma), 3);
    REQUIRE(d);
    CHECK(ok(ctx("x", delta), d));
    CHECK_FALSE(search_typing({}, C("get[l0](\\x. unit x)"), convergence_type(), 6));
    CHECK_FALSE(search_typing({}, omega_c(), convergence_type(), 6));
    CHECK(search_typing({}, C("get[l0](\\x. unit x)"), R("<l0 : wD> -> wD x <l0 : wD>"), 4));
}

TEST_CASE("property: certificates, subject reduction and inversion") {
    Rng rng(51);
    TermShape shape{16, {0, 1}};
    for (int i = 0; i < 60; ++i) {
        Comp m = random_converging(rng, shape, 200, 2);
        CertifyResult r = certify_convergence(m, 200);
        REQUIRE(r.ok);
        CHECK(ok({}, r.cert.term));
        CHECK(alpha_eq(r.cert.term->subject.comp, m));
        Deriv d = r.cert.config;
        for (std::size_t k = 0; k + 1 < r.cert.trace.size(); ++k) {
            d = preserve_step({}, d, r.cert.trace[k], r.cert.trace[k + 1]);
            CHECK(ok({}, d));
            CHECK(equiv(d, "wD x wS"));
        }
        // structural nodes under omega/meet/sub match the term's head, and
        // their meet is below the root
        auto front = frontier(r.cert.term);
        REQUIRE_FALSE(front.empty());
        Type acc = top_of(Sort::T);
        for (auto& n : front) {
            DRule want = DRule::Unit;
            switch (m->kind) {
            case CompNode::Kind::Unit: want = DRule::Unit; break;
            case CompNode::Kind::Bind: want = DRule::Bind; break;
            case CompNode::Kind::Get: want = DRule::Get; break;
            case CompNode::Kind::Set: want = DRule::Set; break;
            }
            CHECK(n->rule == want);
            acc = meet(acc, n->canon);
        }
        CHECK(subtype(acc, r.cert.term->canon));

        ConfParts parts = conf_normal(r.cert.config);
        CHECK(ok({}, parts.comp));
        CHECK(ok({}, parts.store));
    }
}
