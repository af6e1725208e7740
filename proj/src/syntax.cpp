#include "limp/syntax.hpp"

#include <algorithm>

namespace limp {

Value var(std::string name) {
    return std::make_shared<const ValueNode>(ValueNode{ValueNode::Kind::Var, std::move(name), nullptr});
}

Value lam(std::string binder, Comp body) {
    return std::make_shared<const ValueNode>(ValueNode{ValueNode::Kind::Lam, std::move(binder), std::move(body)});
}

Comp unit(Value v) {
    return std::make_shared<const CompNode>(CompNode{CompNode::Kind::Unit, std::move(v), nullptr, 0, {}});
}

Comp bind(Comp m, Value v) {
    return std::make_shared<const CompNode>(CompNode{CompNode::Kind::Bind, std::move(v), std::move(m), 0, {}});
}

Comp get(Loc l, std::string binder, Comp body) {
    return std::make_shared<const CompNode>(
        CompNode{CompNode::Kind::Get, nullptr, std::move(body), l, std::move(binder)});
}

Comp set(Loc l, Value v, Comp m) {
    return std::make_shared<const CompNode>(CompNode{CompNode::Kind::Set, std::move(v), std::move(m), l, {}});
}

namespace {

void fv(const Value& v, std::vector<std::string>& bound, VarSet& out);

void fv(const Comp& m, std::vector<std::string>& bound, VarSet& out) {
    switch (m->kind) {
    case CompNode::Kind::Unit:
        fv(m->val, bound, out);
        break;
    case CompNode::Kind::Bind:
        fv(m->comp, bound, out);
        fv(m->val, bound, out);
        break;
    case CompNode::Kind::Get:
        bound.push_back(m->name);
        fv(m->comp, bound, out);
        bound.pop_back();
        break;
    case CompNode::Kind::Set:
        fv(m->val, bound, out);
        fv(m->comp, bound, out);
        break;
    }
}

void fv(const Value& v, std::vector<std::string>& bound, VarSet& out) {
    if (v->kind == ValueNode::Kind::Var) {
        if (std::find(bound.begin(), bound.end(), v->name) == bound.end()) out.insert(v->name);
        return;
    }
    bound.push_back(v->name);
    fv(v->body, bound, out);
    bound.pop_back();
}

}  // namespace

VarSet free_vars(const Value& v) {
    std::vector<std::string> bound;
    VarSet out;
    fv(v, bound, out);
    return out;
}

VarSet free_vars(const Comp& m) {
    std::vector<std::string> bound;
    VarSet out;
    fv(m, bound, out);
    return out;
}

bool is_free(const std::string& x, const Value& v) {
    if (v->kind == ValueNode::Kind::Var) return v->name == x;
    return v->name != x && is_free(x, v->body);
}

bool is_free(const std::string& x, const Comp& m) {
    switch (m->kind) {
    case CompNode::Kind::Unit: return is_free(x, m->val);
    case CompNode::Kind::Bind: return is_free(x, m->comp) || is_free(x, m->val);
    case CompNode::Kind::Get: return m->name != x && is_free(x, m->comp);
    case CompNode::Kind::Set: return is_free(x, m->val) || is_free(x, m->comp);
    }
    return false;
}

bool closed(const Value& v) { return free_vars(v).empty(); }
bool closed(const Comp& m) { return free_vars(m).empty(); }

void collect_names(const Value& v, VarSet& out) {
    out.insert(v->name);
    if (v->kind == ValueNode::Kind::Lam) collect_names(v->body, out);
}

void collect_names(const Comp& m, VarSet& out) {
    switch (m->kind) {
    case CompNode::Kind::Unit: collect_names(m->val, out); break;
    case CompNode::Kind::Bind:
        collect_names(m->comp, out);
        collect_names(m->val, out);
        break;
    case CompNode::Kind::Get:
        out.insert(m->name);
        collect_names(m->comp, out);
        break;
    case CompNode::Kind::Set:
        collect_names(m->val, out);
        collect_names(m->comp, out);
        break;
    }
}

std::string fresh_variant(const std::string& base, const VarSet& avoid) {
    std::string cand = base;
    while (avoid.count(cand)) cand += '\'';
    return cand;
}

std::string fresh_prime(const std::string& base, const VarSet& avoid) {
    return fresh_variant(base + "'", avoid);
}

namespace {

// Binder y is renamed when it would capture a free variable of v.
// The fresh name avoids every name of the body so the inner renaming
// never triggers further renamings.
std::string capture_free_binder(const std::string& y, const std::string& x, const Value& v,
                                const Comp& body) {
    VarSet avoid = free_vars(v);
    collect_names(body, avoid);
    avoid.insert(x);
    return fresh_prime(y, avoid);
}

}  // namespace

Value substitute(const Value& w, const std::string& x, const Value& v) {
    if (!is_free(x, w)) return w;
    if (w->kind == ValueNode::Kind::Var) return v;
    std::string y = w->name;
    Comp body = w->body;
    if (is_free(y, v)) {
        std::string y2 = capture_free_binder(y, x, v, body);
        body = substitute(body, y, var(y2));
        y = y2;
    }
    return lam(y, substitute(body, x, v));
}

Comp substitute(const Comp& m, const std::string& x, const Value& v) {
    if (!is_free(x, m)) return m;
    switch (m->kind) {
    case CompNode::Kind::Unit: return unit(substitute(m->val, x, v));
    case CompNode::Kind::Bind: return bind(substitute(m->comp, x, v), substitute(m->val, x, v));
    case CompNode::Kind::Set: return set(m->loc, substitute(m->val, x, v), substitute(m->comp, x, v));
    case CompNode::Kind::Get: {
        std::string y = m->name;
        Comp body = m->comp;
        if (is_free(y, v)) {
            std::string y2 = capture_free_binder(y, x, v, body);
            body = substitute(body, y, var(y2));
            y = y2;
        }
        return get(m->loc, y, substitute(body, x, v));
    }
    }
    return m;
}

namespace {

using Env = std::vector<std::string>;

// Position of the innermost binder for `name`, counted from the top of the stack.
long lookup(const Env& env, const std::string& name) {
    for (std::size_t i = env.size(); i-- > 0;)
        if (env[i] == name) return static_cast<long>(env.size() - 1 - i);
    return -1;
}

bool aeq(const Value& a, const Value& b, Env& ea, Env& eb);

bool aeq(const Comp& a, const Comp& b, Env& ea, Env& eb) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case CompNode::Kind::Unit: return aeq(a->val, b->val, ea, eb);
    case CompNode::Kind::Bind: return aeq(a->comp, b->comp, ea, eb) && aeq(a->val, b->val, ea, eb);
    case CompNode::Kind::Set: return a->loc == b->loc && aeq(a->val, b->val, ea, eb) && aeq(a->comp, b->comp, ea, eb);
    case CompNode::Kind::Get: {
        if (a->loc != b->loc) return false;
        ea.push_back(a->name);
        eb.push_back(b->name);
        bool r = aeq(a->comp, b->comp, ea, eb);
        ea.pop_back();
        eb.pop_back();
        return r;
    }
    }
    return false;
}

bool aeq(const Value& a, const Value& b, Env& ea, Env& eb) {
    if (a->kind != b->kind) return false;
    if (a->kind == ValueNode::Kind::Var) {
        long ia = lookup(ea, a->name), ib = lookup(eb, b->name);
        if (ia != ib) return false;
        return ia >= 0 || a->name == b->name;
    }
    ea.push_back(a->name);
    eb.push_back(b->name);
    bool r = aeq(a->body, b->body, ea, eb);
    ea.pop_back();
    eb.pop_back();
    return r;
}

void key(const Value& v, Env& env, std::string& out);

void key(const Comp& m, Env& env, std::string& out) {
    switch (m->kind) {
    case CompNode::Kind::Unit:
        out += "u(";
        key(m->val, env, out);
        out += ')';
        break;
    case CompNode::Kind::Bind:
        out += "b(";
        key(m->comp, env, out);
        out += ',';
        key(m->val, env, out);
        out += ')';
        break;
    case CompNode::Kind::Get:
        out += "g" + std::to_string(m->loc) + "(";
        env.push_back(m->name);
        key(m->comp, env, out);
        env.pop_back();
        out += ')';
        break;
    case CompNode::Kind::Set:
        out += "s" + std::to_string(m->loc) + "(";
        key(m->val, env, out);
        out += ',';
        key(m->comp, env, out);
        out += ')';
        break;
    }
}

void key(const Value& v, Env& env, std::string& out) {
    if (v->kind == ValueNode::Kind::Var) {
        long i = lookup(env, v->name);
        if (i >= 0)
            out += "#" + std::to_string(i);
        else
            out += "$" + v->name;
        return;
    }
    out += "L(";
    env.push_back(v->name);
    key(v->body, env, out);
    env.pop_back();
    out += ')';
}

}  // namespace

bool alpha_eq(const Value& a, const Value& b) {
    if (a == b) return true;
    Env ea, eb;
    return aeq(a, b, ea, eb);
}

bool alpha_eq(const Comp& a, const Comp& b) {
    if (a == b) return true;
    Env ea, eb;
    return aeq(a, b, ea, eb);
}

std::string nameless_key(const Value& v) {
    Env env;
    std::string out;
    key(v, env, out);
    return out;
}

std::string nameless_key(const Comp& m) {
    Env env;
    std::string out;
    key(m, env, out);
    return out;
}

std::size_t size(const Value& v) {
    return v->kind == ValueNode::Kind::Var ? 1 : 1 + size(v->body);
}

std::size_t size(const Comp& m) {
    switch (m->kind) {
    case CompNode::Kind::Unit: return 1 + size(m->val);
    case CompNode::Kind::Bind: return 1 + size(m->comp) + size(m->val);
    case CompNode::Kind::Get: return 1 + size(m->comp);
    case CompNode::Kind::Set: return 1 + size(m->val) + size(m->comp);
    }
    return 0;
}

namespace {
void locs_v(const Value& v, std::set<Loc>& out) {
    if (v->kind == ValueNode::Kind::Lam) collect_locs(v->body, out);
}
}  // namespace

void collect_locs(const Comp& m, std::set<Loc>& out) {
    switch (m->kind) {
    case CompNode::Kind::Unit: locs_v(m->val, out); break;
    case CompNode::Kind::Bind:
        collect_locs(m->comp, out);
        locs_v(m->val, out);
        break;
    case CompNode::Kind::Get:
        out.insert(m->loc);
        collect_locs(m->comp, out);
        break;
    case CompNode::Kind::Set:
        out.insert(m->loc);
        locs_v(m->val, out);
        collect_locs(m->comp, out);
        break;
    }
}

Comp let_in(const std::string& x, Comp m, Comp n) { return bind(std::move(m), lam(x, std::move(n))); }

Comp app_value(Value v, Value w) { return bind(unit(std::move(w)), std::move(v)); }

Comp app_comp(Comp m, Comp n) {
    std::string z = fresh_variant("z", free_vars(n));
    return bind(std::move(m), lam(z, bind(std::move(n), var(z))));
}

Comp seq(Comp m, Comp n) {
    std::string d = fresh_variant("_", free_vars(n));
    return bind(std::move(m), lam(d, std::move(n)));
}

Comp omega_c() {
    auto half = [] { return lam("x", bind(unit(var("x")), var("x"))); };
    return bind(unit(half()), half());
}

Value identity_value() { return lam("x", unit(var("x"))); }

}  // namespace limp
