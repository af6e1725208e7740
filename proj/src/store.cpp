#include "limp/store.hpp"

#include <map>

#include "limp/errors.hpp"

namespace limp {

Store emp() {
    static const Store e = std::make_shared<const StoreNode>(StoreNode{StoreNode::Kind::Emp, 0, nullptr, nullptr});
    return e;
}

Store upd(Loc l, Lookup u, Store s) {
    return std::make_shared<const StoreNode>(StoreNode{StoreNode::Kind::Upd, l, std::move(u), std::move(s)});
}

Store upd(Loc l, Value v, Store s) { return upd(l, val(std::move(v)), std::move(s)); }

Lookup val(Value v) {
    return std::make_shared<const LookupNode>(LookupNode{LookupNode::Kind::Val, std::move(v), 0, nullptr});
}

Lookup lkp(Loc l, Store s) {
    if (!in_dom(l, s))
        throw WellFormedness("lkp(l" + std::to_string(l) + ", ...) requires l" + std::to_string(l) +
                             " in the domain of its store");
    return std::make_shared<const LookupNode>(LookupNode{LookupNode::Kind::Lkp, nullptr, l, std::move(s)});
}

LocSet dom_store(const Store& s) {
    LocSet out;
    for (const StoreNode* p = s.get(); p->kind == StoreNode::Kind::Upd; p = p->rest.get()) out.insert(p->loc);
    return out;
}

bool in_dom(Loc l, const Store& s) {
    for (const StoreNode* p = s.get(); p->kind == StoreNode::Kind::Upd; p = p->rest.get())
        if (p->loc == l) return true;
    return false;
}

Value resolve(const Lookup& u) {
    if (u->kind == LookupNode::Kind::Val) return u->val;
    return resolve_lookup(u->loc, u->store);
}

Value resolve_lookup(Loc l, const Store& s) {
    for (const StoreNode* p = s.get(); p->kind == StoreNode::Kind::Upd; p = p->rest.get())
        if (p->loc == l) return resolve(p->entry);
    throw UndefinedLocation(l);
}

Store remove(const Store& s, Loc l) {
    if (s->kind == StoreNode::Kind::Emp) return s;
    if (!in_dom(l, s)) return s;
    if (s->loc == l) return remove(s->rest, l);
    return upd(s->loc, s->entry, remove(s->rest, l));
}

Store normal_form(const Store& s) {
    LocSet d = dom_store(s);
    Store out = emp();
    for (auto it = d.rbegin(); it != d.rend(); ++it) out = upd(*it, resolve_lookup(*it, s), out);
    return out;
}

bool ext_equiv(const Store& s, const Store& t) {
    LocSet ds = dom_store(s);
    if (ds != dom_store(t)) return false;
    for (Loc l : ds)
        if (!alpha_eq(resolve_lookup(l, s), resolve_lookup(l, t))) return false;
    return true;
}

bool store_eq(const Store& s, const Store& t) { return ext_equiv(normal_form(s), normal_form(t)); }

bool closed(const Lookup& u) {
    if (u->kind == LookupNode::Kind::Val) return closed(u->val);
    return closed(u->store);
}

bool closed(const Store& s) {
    for (const StoreNode* p = s.get(); p->kind == StoreNode::Kind::Upd; p = p->rest.get())
        if (!closed(p->entry)) return false;
    return true;
}

Lookup substitute(const Lookup& u, const std::string& x, const Value& v) {
    if (u->kind == LookupNode::Kind::Val) {
        Value w = substitute(u->val, x, v);
        return w == u->val ? u : val(w);
    }
    Store s = substitute(u->store, x, v);
    return s == u->store ? u : lkp(u->loc, s);
}

Store substitute(const Store& s, const std::string& x, const Value& v) {
    if (s->kind == StoreNode::Kind::Emp) return s;
    Lookup u = substitute(s->entry, x, v);
    Store r = substitute(s->rest, x, v);
    if (u == s->entry && r == s->rest) return s;
    return upd(s->loc, u, r);
}

bool same_lookup(const Lookup& a, const Lookup& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    if (a->kind == LookupNode::Kind::Val) return alpha_eq(a->val, b->val);
    return a->loc == b->loc && same_store(a->store, b->store);
}

bool same_store(const Store& a, const Store& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    if (a->kind == StoreNode::Kind::Emp) return true;
    return a->loc == b->loc && same_lookup(a->entry, b->entry) && same_store(a->rest, b->rest);
}

std::string lookup_key(const Lookup& u) {
    if (u->kind == LookupNode::Kind::Val) return "v[" + nameless_key(u->val) + "]";
    return "k" + std::to_string(u->loc) + "(" + store_key(u->store) + ")";
}

std::string store_key(const Store& s) {
    if (s->kind == StoreNode::Kind::Emp) return "e";
    return "p" + std::to_string(s->loc) + "(" + lookup_key(s->entry) + "," + store_key(s->rest) + ")";
}

std::size_t size(const Lookup& u) {
    if (u->kind == LookupNode::Kind::Val) return 1;
    return 1 + size(u->store);
}

std::size_t size(const Store& s) {
    if (s->kind == StoreNode::Kind::Emp) return 1;
    return 1 + size(s->entry) + size(s->rest);
}

}  // namespace limp
