#include "limp/rewrite.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace limp {

namespace {

struct Tables {
    std::vector<std::vector<Store>> stores;    // by exact size
    std::vector<std::vector<Lookup>> lookups;  // by exact size
};

Tables build_tables(const std::vector<Loc>& locs, const std::vector<Value>& values, std::size_t max_size) {
    Tables t;
    t.stores.resize(max_size + 1);
    t.lookups.resize(max_size + 1);
    for (std::size_t n = 1; n <= max_size; ++n) {
        if (n == 1) {
            t.stores[1].push_back(emp());
            for (const auto& v : values) t.lookups[1].push_back(val(v));
            continue;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            std::size_t r = n - 1 - k;
            for (Loc l : locs)
                for (const auto& u : t.lookups[k])
                    for (const auto& s : t.stores[r]) t.stores[n].push_back(upd(l, u, s));
        }
        for (Loc l : locs)
            for (const auto& s : t.stores[n - 1])
                if (in_dom(l, s)) t.lookups[n].push_back(lkp(l, s));
    }
    return t;
}

}  // namespace

std::vector<Store> enumerate_stores(const std::vector<Loc>& locs, const std::vector<Value>& values,
                                    std::size_t max_size) {
    Tables t = build_tables(locs, values, max_size);
    std::vector<Store> out;
    for (auto& bucket : t.stores) out.insert(out.end(), bucket.begin(), bucket.end());
    return out;
}

std::vector<Lookup> enumerate_lookups(const std::vector<Loc>& locs, const std::vector<Value>& values,
                                      std::size_t max_size) {
    Tables t = build_tables(locs, values, max_size);
    std::vector<Lookup> out;
    for (auto& bucket : t.lookups) out.insert(out.end(), bucket.begin(), bucket.end());
    return out;
}

StoreRewriter::StoreRewriter(std::vector<Loc> locs, std::vector<Value> values, std::size_t max_size)
    : locs_(std::move(locs)), values_(std::move(values)), max_size_(max_size) {
    store_menu_ = enumerate_stores(locs_, values_, max_size_);
    lookup_menu_ = enumerate_lookups(locs_, values_, max_size_);
}

void StoreRewriter::store_steps(const Store& s, std::size_t slack, std::vector<Store>& out) const {
    std::size_t n = size(s);
    // (3) upd(l, lkp l(t), t) = t, both directions
    if (s->kind == StoreNode::Kind::Upd && s->entry->kind == LookupNode::Kind::Lkp && s->entry->loc == s->loc &&
        same_store(s->entry->store, s->rest))
        out.push_back(s->rest);
    if (slack >= n + 2)
        for (Loc l : dom_store(s)) out.push_back(upd(l, lkp(l, s), s));
    if (s->kind == StoreNode::Kind::Upd) {
        const Store& r = s->rest;
        // (4) upd(l, U, upd(l, W, t)) = upd(l, U, t)
        if (r->kind == StoreNode::Kind::Upd && r->loc == s->loc) out.push_back(upd(s->loc, s->entry, r->rest));
        for (const auto& w : lookup_menu_) {
            if (1 + size(w) > slack) break;
            out.push_back(upd(s->loc, s->entry, upd(s->loc, w, r)));
        }
        // (5) commutation of distinct locations
        if (r->kind == StoreNode::Kind::Upd && r->loc != s->loc)
            out.push_back(upd(r->loc, r->entry, upd(s->loc, s->entry, r->rest)));
        // congruence
        std::vector<Lookup> us;
        lookup_steps(s->entry, slack, us);
        for (auto& u : us) out.push_back(upd(s->loc, u, r));
        std::vector<Store> rs;
        store_steps(r, slack, rs);
        for (auto& r2 : rs) out.push_back(upd(s->loc, s->entry, r2));
    }
}

void StoreRewriter::lookup_steps(const Lookup& u, std::size_t slack, std::vector<Lookup>& out) const {
    // (1) lkp l(upd(l, u, t)) = u, right-to-left introduces a store t
    for (const auto& t : store_menu_) {
        if (2 + size(t) > slack) break;
        for (Loc l : locs_) out.push_back(lkp(l, upd(l, u, t)));
    }
    if (u->kind != LookupNode::Kind::Lkp) return;
    const Store& s = u->store;
    if (s->kind == StoreNode::Kind::Upd) {
        if (s->loc == u->loc)
            out.push_back(s->entry);
        else  // (2) lkp l(upd(l', w, t)) = lkp l(t)
            out.push_back(lkp(u->loc, s->rest));
    }
    for (const auto& w : lookup_menu_) {
        if (1 + size(w) > slack) break;
        for (Loc l2 : locs_)
            if (l2 != u->loc) out.push_back(lkp(u->loc, upd(l2, w, s)));
    }
    std::vector<Store> ss;
    store_steps(s, slack, ss);
    for (auto& s2 : ss) out.push_back(lkp(u->loc, s2));
}

const std::vector<Store>& StoreRewriter::neighbors(const Store& s) {
    std::string k = store_key(s);
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    std::vector<Store> raw;
    std::size_t n = size(s);
    std::size_t slack = n >= max_size_ ? 0 : max_size_ - n;
    store_steps(s, slack, raw);
    std::vector<Store> out;
    std::unordered_set<std::string> seen;
    for (auto& t : raw) {
        if (size(t) > max_size_) continue;
        if (seen.insert(store_key(t)).second) out.push_back(t);
    }
    return cache_.emplace(k, std::move(out)).first->second;
}

std::unordered_set<std::string> StoreRewriter::closure(const Store& s, unsigned depth) {
    std::unordered_set<std::string> seen{store_key(s)};
    std::vector<Store> frontier{s};
    for (unsigned d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<Store> next;
        for (const auto& t : frontier)
            for (const auto& u : neighbors(t))
                if (seen.insert(store_key(u)).second) next.push_back(u);
        frontier = std::move(next);
    }
    return seen;
}

bool StoreRewriter::provable(const Store& s, const Store& t, unsigned depth) {
    std::string goal = store_key(t);
    std::string start = store_key(s);
    if (goal == start) return true;
    std::unordered_set<std::string> seen{start};
    std::vector<Store> frontier{s};
    for (unsigned d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<Store> next;
        for (const auto& a : frontier)
            for (const auto& b : neighbors(a)) {
                std::string k = store_key(b);
                if (k == goal) return true;
                if (seen.insert(k).second) next.push_back(b);
            }
        frontier = std::move(next);
    }
    return false;
}

namespace {

void gather(const Store& s, std::set<Loc>& locs, std::map<std::string, Value>& values);

void gather(const Lookup& u, std::set<Loc>& locs, std::map<std::string, Value>& values) {
    if (u->kind == LookupNode::Kind::Val) {
        values.emplace(nameless_key(u->val), u->val);
        return;
    }
    locs.insert(u->loc);
    gather(u->store, locs, values);
}

void gather(const Store& s, std::set<Loc>& locs, std::map<std::string, Value>& values) {
    for (const StoreNode* p = s.get(); p->kind == StoreNode::Kind::Upd; p = p->rest.get()) {
        locs.insert(p->loc);
        gather(p->entry, locs, values);
    }
}

}  // namespace

bool rewrite_oracle(const Store& s, const Store& t, unsigned depth) {
    std::set<Loc> locs;
    std::map<std::string, Value> values;
    gather(s, locs, values);
    gather(t, locs, values);
    std::vector<Value> vs;
    for (auto& [k, v] : values) vs.push_back(v);
    StoreRewriter rw({locs.begin(), locs.end()}, vs, std::max(size(s), size(t)) + 2);
    return rw.provable(s, t, depth);
}

}  // namespace limp
