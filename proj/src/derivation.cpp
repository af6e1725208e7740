#include "limp/derivation.hpp"

#include <algorithm>

#include "limp/text.hpp"

namespace limp {

Sort subject_sort(Subject::Kind k) {
    switch (k) {
    case Subject::Kind::Value: return Sort::D;
    case Subject::Kind::Comp: return Sort::T;
    case Subject::Kind::Store: return Sort::S;
    case Subject::Kind::Lookup: return Sort::D;
    case Subject::Kind::Config: return Sort::C;
    }
    return Sort::D;
}

bool same_subject(const Subject& a, const Subject& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Subject::Kind::Value: return alpha_eq(a.value, b.value);
    case Subject::Kind::Comp: return alpha_eq(a.comp, b.comp);
    case Subject::Kind::Store: return same_store(a.store, b.store);
    case Subject::Kind::Lookup: return same_lookup(a.lookup, b.lookup);
    case Subject::Kind::Config: return alpha_eq(a.comp, b.comp) && same_store(a.store, b.store);
    }
    return false;
}

std::string render(const Subject& s, bool unicode) {
    switch (s.kind) {
    case Subject::Kind::Value: return render(s.value, unicode);
    case Subject::Kind::Comp: return render(s.comp, unicode);
    case Subject::Kind::Store: return render(s.store, unicode);
    case Subject::Kind::Lookup: return render(s.lookup, unicode);
    case Subject::Kind::Config: return render(Configuration{s.comp, s.store}, unicode);
    }
    return "?";
}

namespace {
struct RuleName {
    DRule rule;
    const char* name;
};
const RuleName kRuleNames[] = {
    {DRule::Omega, "omega"}, {DRule::Meet, "meet"}, {DRule::Sub, "sub"},     {DRule::Var, "var"},
    {DRule::Lam, "lam"},     {DRule::Unit, "unit"}, {DRule::Bind, "bind"},   {DRule::Get, "get"},
    {DRule::Set, "set"},     {DRule::UpdA, "upd-a"}, {DRule::UpdB, "upd-b"}, {DRule::Lkp, "lkp"},
    {DRule::Conf, "conf"},
};
}  // namespace

const char* rule_name(DRule r) {
    for (const auto& rn : kRuleNames)
        if (rn.rule == r) return rn.name;
    return "?";
}

std::optional<DRule> rule_from_name(const std::string& s) {
    for (const auto& rn : kRuleNames)
        if (s == rn.name) return rn.rule;
    return std::nullopt;
}

Deriv make_deriv(DRule rule, Subject subject, Raw type, std::vector<Deriv> premises) {
    Type canon = normalize_type(type);
    return std::make_shared<const DerivNode>(
        DerivNode{rule, std::move(subject), std::move(type), std::move(canon), std::move(premises)});
}

std::size_t deriv_size(const Deriv& d) {
    std::size_t n = 1;
    for (const auto& p : d->premises) n += deriv_size(p);
    return n;
}

std::size_t deriv_height(const Deriv& d) {
    std::size_t h = 0;
    for (const auto& p : d->premises) h = std::max(h, deriv_height(p));
    return h + 1;
}

Context ctx_extend(Context g, const std::string& x, const Raw& d) {
    g[x] = {d, normalize_type(d).d};
    return g;
}

const char* reason_name(CheckReason r) {
    switch (r) {
    case CheckReason::ShapeMismatch: return "ShapeMismatch";
    case CheckReason::SubtypeFails: return "SubtypeFails";
    case CheckReason::SideConditionFails: return "SideConditionFails";
    case CheckReason::ContextMismatch: return "ContextMismatch";
    }
    return "?";
}

std::string CheckResult::describe() const {
    if (ok) return "ok";
    std::string p = "root";
    for (auto i : path) p += "." + std::to_string(i);
    return std::string(reason_name(reason)) + " at " + p + ": " + message;
}

// ---------------------------------------------------------------- checker

namespace {

using K = RawNode::Kind;

struct Failure {
    CheckReason reason;
    std::string message;
};

bool equiv_raw(const Type& t, const Raw& r) { return type_equiv(t, normalize_type(r)); }

class Checker {
public:
    CheckResult run(const Context& g, const Deriv& d) {
        CheckResult r;
        path_.clear();
        if (auto f = node(g, d)) {
            r.ok = false;
            r.reason = f->reason;
            r.message = f->message;
            r.path = failed_path_;
        }
        return r;
    }

private:
    std::vector<std::size_t> path_, failed_path_;

    std::optional<Failure> fail(CheckReason reason, std::string msg) {
        failed_path_ = path_;
        return Failure{reason, std::move(msg)};
    }

    std::optional<Failure> shape(const std::string& msg) { return fail(CheckReason::ShapeMismatch, msg); }

    std::optional<Failure> premise(const Context& g, const Deriv& d, std::size_t i) {
        path_.push_back(i);
        auto f = node(g, d->premises[i]);
        path_.pop_back();
        return f;
    }

    std::optional<Failure> need_premises(const Deriv& d, std::size_t n) {
        if (d->premises.size() != n)
            return shape(std::string(rule_name(d->rule)) + " takes " + std::to_string(n) + " premise(s), got " +
                         std::to_string(d->premises.size()));
        return std::nullopt;
    }

    std::optional<Failure> need_subject(const Deriv& p, const Subject& expected, const char* what) {
        if (!same_subject(p->subject, expected))
            return shape(std::string("premise subject should be the ") + what + " " + render(expected));
        return std::nullopt;
    }

    std::optional<Failure> need_type(const Deriv& p, const Raw& expected, const char* what) {
        if (!equiv_raw(p->canon, expected))
            return shape(std::string(what) + " has type " + render(p->type) + ", expected " + render(expected));
        return std::nullopt;
    }

    std::optional<Failure> local(const Context& g, const Deriv& d, std::vector<Context>& ctxs);

    std::optional<Failure> node(const Context& g, const Deriv& d) {
        if (!d) return shape("missing node");
        if (d->type->sort != subject_sort(d->subject.kind))
            return shape(std::string(sort_name(d->type->sort)) + " type assigned to a " +
                         sort_name(subject_sort(d->subject.kind)) + " subject");
        std::vector<Context> ctxs(d->premises.size(), g);
        if (auto f = local(g, d, ctxs)) return f;
        for (std::size_t i = 0; i < d->premises.size(); ++i)
            if (auto f = premise(ctxs[i], d, i)) return f;
        return std::nullopt;
    }
};

std::optional<Failure> Checker::local(const Context& g, const Deriv& d, std::vector<Context>& ctxs) {
    const Subject& s = d->subject;
    const Raw& t = d->type;
    const auto& ps = d->premises;
    using SK = Subject::Kind;
    auto kind_is = [&](SK k, const char* what) -> std::optional<Failure> {
        if (s.kind != k) return shape(std::string(rule_name(d->rule)) + " needs a " + what + " subject");
        return std::nullopt;
    };

    switch (d->rule) {
    case DRule::Omega:
        if (auto f = need_premises(d, 0)) return f;
        if (!is_top(d->canon)) return shape("omega node with non-top type " + render(t));
        return std::nullopt;

    case DRule::Meet:
        if (auto f = need_premises(d, 2)) return f;
        for (const auto& p : ps)
            if (auto f = need_subject(p, s, "same subject")) return f;
        if (!type_equiv(d->canon, meet(ps[0]->canon, ps[1]->canon)))
            return shape("type is not the intersection of the premise types");
        return std::nullopt;

    case DRule::Sub:
        if (auto f = need_premises(d, 1)) return f;
        if (auto f = need_subject(ps[0], s, "same subject")) return f;
        if (ps[0]->type->sort != t->sort) return shape("premise of another sort");
        if (!subtype(ps[0]->canon, d->canon))
            return fail(CheckReason::SubtypeFails, render(ps[0]->type) + " is not a subtype of " + render(t));
        return std::nullopt;

    case DRule::Var: {
        if (auto f = kind_is(SK::Value, "value")) return f;
        if (auto f = need_premises(d, 0)) return f;
        if (s.value->kind != ValueNode::Kind::Var) return shape("var needs a variable subject");
        auto it = g.find(s.value->name);
        if (it == g.end()) return fail(CheckReason::ContextMismatch, "variable " + s.value->name + " not in context");
        if (it->second.canon->key != d->canon.d->key)
            return fail(CheckReason::ContextMismatch,
                        "context gives " + s.value->name + " : " + render(it->second.raw) + ", node says " + render(t));
        return std::nullopt;
    }

    case DRule::Lam: {
        if (auto f = kind_is(SK::Value, "value")) return f;
        if (auto f = need_premises(d, 1)) return f;
        if (s.value->kind != ValueNode::Kind::Lam) return shape("lam needs an abstraction subject");
        if (t->kind != K::Arrow) return shape("lam conclusion must be an arrow");
        if (auto f = need_subject(ps[0], Subject::of(s.value->body), "body")) return f;
        if (auto f = need_type(ps[0], t->b, "body")) return f;
        ctxs[0] = ctx_extend(g, s.value->name, t->a);
        return std::nullopt;
    }

    case DRule::Unit: {
        if (auto f = kind_is(SK::Comp, "computation")) return f;
        if (auto f = need_premises(d, 1)) return f;
        if (s.comp->kind != CompNode::Kind::Unit) return shape("unit needs a unit subject");
        if (t->kind != K::Arrow || t->b->kind != K::Prod) return shape("unit conclusion must be s -> d x s");
        if (!type_equiv(normalize_type(t->a), normalize_type(t->b->b)))
            return shape("unit must leave the store type unchanged");
        if (auto f = need_subject(ps[0], Subject::of(s.comp->val), "value")) return f;
        return need_type(ps[0], t->b->a, "returned value");
    }

    case DRule::Bind: {
        if (auto f = kind_is(SK::Comp, "computation")) return f;
        if (auto f = need_premises(d, 2)) return f;
        if (s.comp->kind != CompNode::Kind::Bind) return shape("bind needs a bind subject");
        if (t->kind != K::Arrow || t->b->kind != K::Prod) return shape("bind conclusion must be s -> d x s");
        if (auto f = need_subject(ps[0], Subject::of(s.comp->comp), "left computation")) return f;
        if (auto f = need_subject(ps[1], Subject::of(s.comp->val), "function")) return f;
        const Raw& p1 = ps[0]->type;
        if (p1->kind != K::Arrow || p1->b->kind != K::Prod) return shape("left premise must be s -> d x s");
        if (auto f = need_type(ps[0], r_arrow(t->a, p1->b), "left computation")) return f;
        return need_type(ps[1], r_arrow(p1->b->a, r_arrow(p1->b->b, t->b)), "function");
    }

    case DRule::Get: {
        if (auto f = kind_is(SK::Comp, "computation")) return f;
        if (auto f = need_premises(d, 1)) return f;
        if (s.comp->kind != CompNode::Kind::Get) return shape("get needs a get subject");
        if (t->kind != K::Arrow) return shape("get conclusion must be an arrow");
        const Raw& dom = t->a;
        Raw rec, rest;
        if (dom->kind == K::Meet && dom->a->kind == K::Rec) {
            rec = dom->a;
            rest = dom->b;
        } else if (dom->kind == K::Rec) {
            rec = dom;
            rest = r_omega(Sort::S);
        } else {
            return shape("get domain must be <l : d> /\\ s");
        }
        if (rec->loc != s.comp->loc) return shape("get domain records the wrong location");
        if (auto f = need_subject(ps[0], Subject::of(s.comp->comp), "body")) return f;
        if (auto f = need_type(ps[0], r_arrow(rest, t->b), "body")) return f;
        ctxs[0] = ctx_extend(g, s.comp->name, rec->a);
        return std::nullopt;
    }

    case DRule::Set: {
        if (auto f = kind_is(SK::Comp, "computation")) return f;
        if (auto f = need_premises(d, 2)) return f;
        if (s.comp->kind != CompNode::Kind::Set) return shape("set needs a set subject");
        if (t->kind != K::Arrow) return shape("set conclusion must be an arrow");
        if (auto f = need_subject(ps[0], Subject::of(s.comp->val), "stored value")) return f;
        if (auto f = need_subject(ps[1], Subject::of(s.comp->comp), "continuation")) return f;
        Raw want = r_arrow(r_meet(r_rec(s.comp->loc, ps[0]->type), t->a), t->b);
        if (auto f = need_type(ps[1], want, "continuation")) return f;
        if (dom_sigma(normalize_type(t->a).s).count(s.comp->loc))
            return fail(CheckReason::SideConditionFails,
                        render_loc(s.comp->loc) + " is in the domain of " + render(t->a));
        return std::nullopt;
    }

    case DRule::UpdA: {
        if (auto f = kind_is(SK::Store, "store")) return f;
        if (auto f = need_premises(d, 1)) return f;
        if (s.store->kind != StoreNode::Kind::Upd) return shape("upd-a needs an update subject");
        if (t->kind != K::Rec || t->loc != s.store->loc) return shape("upd-a conclusion must record the updated location");
        const Lookup& u = s.store->entry;
        Subject want = u->kind == LookupNode::Kind::Val ? Subject::of(u->val) : Subject::of(u);
        if (auto f = need_subject(ps[0], want, "stored entry")) return f;
        return need_type(ps[0], t->a, "stored entry");
    }

    case DRule::UpdB: {
        if (auto f = kind_is(SK::Store, "store")) return f;
        if (auto f = need_premises(d, 1)) return f;
        if (s.store->kind != StoreNode::Kind::Upd) return shape("upd-b needs an update subject");
        if (t->kind != K::Rec) return shape("upd-b conclusion must be a record");
        if (t->loc == s.store->loc)
            return fail(CheckReason::SideConditionFails, "upd-b needs a location other than the updated one");
        if (auto f = need_subject(ps[0], Subject::of(s.store->rest), "remaining store")) return f;
        return need_type(ps[0], t, "remaining store");
    }

    case DRule::Lkp: {
        if (auto f = kind_is(SK::Lookup, "lookup")) return f;
        if (auto f = need_premises(d, 1)) return f;
        if (s.lookup->kind != LookupNode::Kind::Lkp) return shape("lkp needs a lookup subject");
        if (auto f = need_subject(ps[0], Subject::of(s.lookup->store), "looked-up store")) return f;
        return need_type(ps[0], r_rec(s.lookup->loc, t), "looked-up store");
    }

    case DRule::Conf: {
        if (auto f = kind_is(SK::Config, "configuration")) return f;
        if (auto f = need_premises(d, 2)) return f;
        if (auto f = need_subject(ps[0], Subject::of(s.comp), "computation")) return f;
        if (auto f = need_subject(ps[1], Subject::of(s.store), "store")) return f;
        const Raw& p1 = ps[0]->type;
        if (p1->kind != K::Arrow) return shape("conf computation premise must be an arrow");
        if (auto f = need_type(ps[0], r_arrow(p1->a, t), "computation")) return f;
        return need_type(ps[1], p1->a, "store");
    }
    }
    return shape("unknown rule");
}

}  // namespace

CheckResult check_derivation(const Context& g, const Deriv& d) { return Checker{}.run(g, d); }

// --------------------------------------------------------------------- io

namespace {

void render_node(const Deriv& d, bool unicode, int indent, std::string& out) {
    out += std::string(static_cast<std::size_t>(indent) * 2, ' ');
    out += "(";
    out += rule_name(d->rule);
    out += " {" + render(d->subject, unicode) + "} : " + render(d->type, unicode);
    for (const auto& p : d->premises) {
        out += "\n";
        render_node(p, unicode, indent + 1, out);
    }
    out += ")";
}

Subject parse_subject(Parser& p, DRule rule) {
    using SK = Subject::Kind;
    auto kind_for = [&]() -> std::optional<SK> {
        switch (rule) {
        case DRule::Var:
        case DRule::Lam: return SK::Value;
        case DRule::Unit:
        case DRule::Bind:
        case DRule::Get:
        case DRule::Set: return SK::Comp;
        case DRule::UpdA:
        case DRule::UpdB: return SK::Store;
        case DRule::Lkp: return SK::Lookup;
        case DRule::Conf: return SK::Config;
        default: return std::nullopt;
        }
    };
    std::optional<SK> k = kind_for();
    if (!k) {
        if (p.at_word("lkp"))
            k = SK::Lookup;
        else if (p.at_word("emp") || p.at_word("upd"))
            k = SK::Store;
        else if (p.at(Token::Kind::LParen)) {
            std::size_t m = p.mark();
            try {
                Configuration c = p.config();
                if (p.at(Token::Kind::RBrace)) return Subject::of(c);
            } catch (const ParseError&) {
            }
            p.reset(m);
        }
    }
    if (k == SK::Lookup) return Subject::of(p.lookup());
    if (k == SK::Store) return Subject::of(p.store());
    if (k == SK::Config) return Subject::of(p.config());
    if (k == SK::Value) return Subject::of(p.value());
    if (k == SK::Comp) return Subject::of(p.comp());
    Expr e = p.expr();
    return e.value ? Subject::of(e.value) : Subject::of(e.comp);
}

Deriv parse_node(Parser& p) {
    p.expect(Token::Kind::LParen, "'('");
    std::string name = p.expect(Token::Kind::Ident, "rule name").text;
    while (p.at(Token::Kind::Minus)) {
        p.accept(Token::Kind::Minus);
        name += "-" + p.expect(Token::Kind::Ident, "rule name").text;
    }
    auto rule = rule_from_name(name);
    if (!rule) {
        p.reset(p.mark() - 1);
        p.fail({"rule name"});
    }
    p.expect(Token::Kind::LBrace, "'{'");
    Subject s = parse_subject(p, *rule);
    p.expect(Token::Kind::RBrace, "'}'");
    p.expect(Token::Kind::Colon, "':'");
    Raw t = p.type();
    std::vector<Deriv> premises;
    while (p.at(Token::Kind::LParen)) premises.push_back(parse_node(p));
    p.expect(Token::Kind::RParen, "')'");
    return make_deriv(*rule, std::move(s), std::move(t), std::move(premises));
}

}  // namespace

std::string render_derivation(const Judgment& j, bool unicode) {
    std::string out;
    if (!j.context.empty()) {
        out += "[";
        bool first = true;
        for (const auto& [x, e] : j.context) {
            if (!first) out += ", ";
            first = false;
            out += x + " : " + render(e.raw, unicode);
        }
        out += unicode ? "] \xE2\x8A\xA2\n" : "] |-\n";
    }
    render_node(j.root, unicode, 0, out);
    out += "\n";
    return out;
}

Judgment parse_derivation(const std::string& src) {
    Parser p(src);
    Judgment j;
    if (p.accept(Token::Kind::LBracket)) {
        if (!p.at(Token::Kind::RBracket)) {
            do {
                std::string x = p.identifier();
                p.expect(Token::Kind::Colon, "':'");
                Raw d = p.type();
                if (d->sort != Sort::D) throw SortMismatch("context entry " + x + " must have a value type");
                if (j.context.count(x)) throw InputInvalid("variable " + x + " declared twice in context");
                j.context = ctx_extend(std::move(j.context), x, d);
            } while (p.accept(Token::Kind::Comma));
        }
        p.expect(Token::Kind::RBracket, "']'");
        p.expect(Token::Kind::Turnstile, "'|-'");
    }
    j.root = parse_node(p);
    p.expect_end();
    return j;
}

}  // namespace limp
