#include "limp/text.hpp"

#include <cctype>
#include <set>

namespace limp {

namespace {

std::string join(const std::vector<std::string>& xs, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

std::string describe(const std::string& found) { return found.empty() ? "end of input" : "'" + found + "'"; }

}  // namespace

ParseError::ParseError(SourceSpan sp, std::vector<std::string> exp, const std::string& found)
    : Error(std::to_string(sp.line) + ":" + std::to_string(sp.column) + ": expected " + join(exp, " or ") +
            ", found " + describe(found)),
      span(sp),
      expected(std::move(exp)) {}

bool is_keyword(const std::string& w) {
    static const std::set<std::string> kw{"unit", "get", "set", "let", "in",  "emp",
                                          "upd",  "lkp", "wD",  "wS",  "wC",  "wT"};
    return kw.count(w) > 0;
}

// ------------------------------------------------------------------ lexer

std::vector<Token> tokenize(const std::string& src) {
    using TK = Token::Kind;
    std::vector<Token> out;
    std::size_t i = 0;
    unsigned line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
                ++col;
            }
        }
    };
    auto starts = [&](const char* s) { return src.compare(i, std::char_traits<char>::length(s), s) == 0; };
    auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };

    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {  // comment to end of line
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t{TK::End, "", {i, i, line, col}};
        std::size_t len = 1;
        struct Sym {
            const char* text;
            TK kind;
        };
        static const Sym syms[] = {
            {">>=", TK::Bind},      {"\xE2\x9F\xAB=", TK::Bind},  {"\xE2\x9F\xAB", TK::Bind},
            {"->", TK::Arrow},      {"\xE2\x86\x92", TK::Arrow},  {"/\\", TK::Meet},
            {"\xE2\x88\xA7", TK::Meet}, {"\xC3\x97", TK::Times},  {"|-", TK::Turnstile},
            {"\xE2\x8A\xA2", TK::Turnstile}, {"\xCE\xBB", TK::Lambda}, {"\\", TK::Lambda},
            {"\xE2\x9F\xA8", TK::Langle}, {"\xE2\x9F\xA9", TK::Rangle}, {".", TK::Dot},
            {"(", TK::LParen},      {")", TK::RParen},            {"[", TK::LBracket},
            {"]", TK::RBracket},    {"{", TK::LBrace},            {"}", TK::RBrace},
            {"<", TK::Langle},      {">", TK::Rangle},            {",", TK::Comma},
            {";", TK::Semi},        {"=", TK::Equals},            {":", TK::Colon},
            {"-", TK::Minus},
        };
        bool matched = false;
        for (const auto& s : syms)
            if (starts(s.text)) {
                t.kind = s.kind;
                len = std::char_traits<char>::length(s.text);
                t.text = src.substr(i, len);
                matched = true;
                break;
            }
        if (!matched) {
            if (starts("\xCF\x89") && i + 2 < src.size() && std::string("DSCT").find(src[i + 2]) != std::string::npos) {
                t.kind = TK::Ident;
                t.text = std::string("w") + src[i + 2];
                len = 3;
            } else if (starts("\xE2\x84\x93")) {  // ℓ
                std::size_t j = i + 3;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                t.kind = TK::Ident;
                t.text = "l" + src.substr(i + 3, j - i - 3);
                len = j - i;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < src.size() && ident_char(src[j])) ++j;
                t.kind = TK::Ident;
                t.text = src.substr(i, j - i);
                len = j - i;
            } else {
                SourceSpan sp{i, i + 1, line, col};
                throw ParseError(sp, {"a token"}, src.substr(i, 1));
            }
        }
        t.span.end = i + len;
        advance(len);
        out.push_back(std::move(t));
    }
    out.push_back({TK::End, "", {i, i, line, col}});
    return out;
}

// ----------------------------------------------------------------- parser

using TK = Token::Kind;

Parser::Parser(const std::string& src) : toks_(tokenize(src)) {}

const Token& Parser::peek(std::size_t ahead) const {
    std::size_t p = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[p];
}

bool Parser::at_word(const std::string& w, std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TK::Ident && t.text == w;
}

bool Parser::accept(TK k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
}

bool Parser::accept_word(const std::string& w) {
    if (!at_word(w)) return false;
    ++pos_;
    return true;
}

void Parser::fail(const std::vector<std::string>& expected) const {
    const Token& t = peek();
    throw ParseError(t.span, expected, t.text);
}

const Token& Parser::expect(TK k, const std::string& what) {
    if (!at(k)) fail({what});
    return toks_[pos_++];
}

void Parser::expect_word(const std::string& w) {
    if (!accept_word(w)) fail({"'" + w + "'"});
}

std::string Parser::identifier() {
    if (!at(TK::Ident) || is_keyword(peek().text)) fail({"identifier"});
    return toks_[pos_++].text;
}

void Parser::expect_end() {
    if (!at(TK::End)) fail({"end of input"});
}

Loc Parser::location() {
    const Token& t = peek();
    if (t.kind == TK::Ident && t.text.size() > 1 && t.text[0] == 'l' && t.text.size() < 10) {
        bool digits = true;
        for (std::size_t k = 1; k < t.text.size(); ++k) digits = digits && std::isdigit(static_cast<unsigned char>(t.text[k]));
        if (digits) {
            ++pos_;
            return static_cast<Loc>(std::stoul(t.text.substr(1)));
        }
    }
    fail({"location"});
}

Comp Parser::as_comp(const Expr& e, const Token& where) const {
    if (e.comp) return e.comp;
    throw ParseError(where.span, {"computation"}, "a value");
}

Value Parser::as_value(const Expr& e, const Token& where) const {
    if (e.value) return e.value;
    throw ParseError(where.span, {"value"}, "a computation");
}

Expr Parser::expr() { return seq_expr(); }

Expr Parser::seq_expr() {
    Token start = peek();
    Expr e = bind_expr();
    if (at(TK::Semi)) {
        Token semi = peek();
        ++pos_;
        Comp left = as_comp(e, start);
        Token rstart = peek();
        Expr r = seq_expr();
        return {nullptr, seq(left, as_comp(r, rstart))};
    }
    return e;
}

Expr Parser::bind_expr() {
    Token start = peek();
    Expr e = app_expr();
    while (at(TK::Bind)) {
        ++pos_;
        Comp left = as_comp(e, start);
        e = {nullptr, bind(left, fn_value())};
    }
    return e;
}

Value Parser::fn_value() {
    Token start = peek();
    if (at(TK::Lambda)) return as_value(app_expr(), start);
    if (!at_primary()) fail({"value"});
    return as_value(primary(), start);
}

namespace {
bool prefix_start(const Parser& p) { return p.at(TK::Lambda) || p.at_word("set") || p.at_word("let"); }
}  // namespace

bool Parser::at_primary() const {
    const Token& t = peek();
    if (t.kind == TK::LParen) return true;
    if (t.kind != TK::Ident) return false;
    return !is_keyword(t.text) || t.text == "unit" || t.text == "get";
}

Expr Parser::app_expr() {
    if (at(TK::Lambda)) {
        ++pos_;
        std::string x = identifier();
        expect(TK::Dot, "'.'");
        Token start = peek();
        Expr body = expr();
        return {lam(x, as_comp(body, start)), nullptr};
    }
    if (accept_word("set")) {
        expect(TK::LBracket, "'['");
        Loc l = location();
        expect(TK::RBracket, "']'");
        expect(TK::LParen, "'('");
        Token vstart = peek();
        Value v = as_value(expr(), vstart);
        expect(TK::RParen, "')'");
        expect(TK::Dot, "'.'");
        Token start = peek();
        Expr body = expr();
        return {nullptr, set(l, v, as_comp(body, start))};
    }
    if (accept_word("let")) {
        std::string x = identifier();
        expect(TK::Equals, "'='");
        Token mstart = peek();
        Comp m = as_comp(expr(), mstart);
        expect_word("in");
        Token nstart = peek();
        Comp n = as_comp(expr(), nstart);
        return {nullptr, let_in(x, m, n)};
    }
    if (!at_primary()) fail({"term"});
    Expr acc = primary();
    while (at_primary() || prefix_start(*this)) {
        bool last = prefix_start(*this);
        Expr next = last ? app_expr() : primary();
        if (acc.value && next.value)
            acc = {nullptr, app_value(acc.value, next.value)};
        else
            acc = {nullptr, app_comp(acc.comp ? acc.comp : unit(acc.value), next.comp ? next.comp : unit(next.value))};
        if (last) break;
    }
    return acc;
}

Expr Parser::primary() {
    const Token& t = peek();
    if (t.kind == TK::LParen) {
        ++pos_;
        Expr e = expr();
        expect(TK::RParen, "')'");
        return e;
    }
    if (accept_word("unit")) {
        Token start = peek();
        if (at(TK::Lambda)) return {nullptr, unit(as_value(app_expr(), start))};
        if (!at_primary()) fail({"value"});
        return {nullptr, unit(as_value(primary(), start))};
    }
    if (accept_word("get")) {
        expect(TK::LBracket, "'['");
        Loc l = location();
        expect(TK::RBracket, "']'");
        expect(TK::LParen, "'('");
        Token start = peek();
        Value v = as_value(expr(), start);
        if (v->kind != ValueNode::Kind::Lam) throw ParseError(start.span, {"abstraction"}, start.text);
        expect(TK::RParen, "')'");
        return {nullptr, get(l, v->name, v->body)};
    }
    return {var(identifier()), nullptr};
}

Value Parser::value() {
    Token start = peek();
    return as_value(expr(), start);
}

Comp Parser::comp() {
    Token start = peek();
    return as_comp(expr(), start);
}

Lookup Parser::entry() {
    if (at_word("lkp")) return lookup();
    return val(value());
}

Store Parser::store() {
    if (accept_word("emp")) return emp();
    if (accept_word("upd")) {
        expect(TK::LParen, "'('");
        Loc l = location();
        expect(TK::Comma, "','");
        Lookup u = entry();
        expect(TK::Comma, "','");
        Store s = store();
        expect(TK::RParen, "')'");
        return upd(l, u, s);
    }
    if (accept(TK::LParen)) {
        Store s = store();
        expect(TK::RParen, "')'");
        return s;
    }
    fail({"'emp'", "'upd'"});
}

Lookup Parser::lookup() {
    if (accept_word("lkp")) {
        expect(TK::LParen, "'('");
        Loc l = location();
        expect(TK::Comma, "','");
        Store s = store();
        expect(TK::RParen, "')'");
        return lkp(l, s);
    }
    return val(value());
}

Configuration Parser::config() {
    expect(TK::LParen, "'('");
    Comp m = comp();
    expect(TK::Comma, "','");
    Store s = store();
    expect(TK::RParen, "')'");
    return {m, s};
}

Raw Parser::type() {
    Raw t = type_prod();
    if (accept(TK::Arrow)) return r_arrow(t, type());
    return t;
}

Raw Parser::type_prod() {
    Raw d = type_meet();
    if (accept(TK::Times) || accept_word("x")) return r_prod(d, type_meet());
    return d;
}

Raw Parser::type_meet() {
    Raw a = type_atom();
    if (accept(TK::Meet)) return r_meet(a, type_meet());
    return a;
}

Raw Parser::type_atom() {
    if (accept_word("wD")) return r_omega(Sort::D);
    if (accept_word("wS")) return r_omega(Sort::S);
    if (accept_word("wC")) return r_omega(Sort::C);
    if (accept_word("wT")) return r_omega(Sort::T);
    if (accept(TK::Langle)) {
        Loc l = location();
        expect(TK::Colon, "':'");
        Raw d = type();
        expect(TK::Rangle, "'>'");
        return r_rec(l, d);
    }
    if (accept(TK::LParen)) {
        Raw t = type();
        expect(TK::RParen, "')'");
        return t;
    }
    fail({"type"});
}

namespace {
template <class F>
auto whole(const std::string& src, F f) {
    Parser p(src);
    auto r = f(p);
    p.expect_end();
    return r;
}
}  // namespace

Value parse_value(const std::string& src) {
    return whole(src, [](Parser& p) { return p.value(); });
}
Comp parse_comp(const std::string& src) {
    return whole(src, [](Parser& p) { return p.comp(); });
}
Store parse_store(const std::string& src) {
    return whole(src, [](Parser& p) { return p.store(); });
}
Lookup parse_lookup(const std::string& src) {
    return whole(src, [](Parser& p) { return p.lookup(); });
}
Raw parse_type(const std::string& src) {
    return whole(src, [](Parser& p) { return p.type(); });
}
Configuration parse_config(const std::string& src) {
    return whole(src, [](Parser& p) { return p.config(); });
}

// --------------------------------------------------------------- renderer

namespace {

struct Printer {
    bool uni;

    const char* lam() const { return uni ? "\xCE\xBB" : "\\"; }

    std::string value(const Value& v) const {
        if (v->kind == ValueNode::Kind::Var) return v->name;
        return lam() + v->name + ". " + comp(v->body, true);
    }

    std::string value_atom(const Value& v) const {
        if (v->kind == ValueNode::Kind::Var) return v->name;
        return "(" + value(v) + ")";
    }

    // `tail`: nothing follows inside the enclosing group, so prefix forms
    // that extend to the right need no parentheses.
    std::string comp(const Comp& m, bool tail) const {
        switch (m->kind) {
        case CompNode::Kind::Unit: return "unit " + value_atom(m->val);
        case CompNode::Kind::Get:
            return "get[" + render_loc(m->loc, uni) + "](" + lam() + m->name + ". " + comp(m->comp, true) + ")";
        case CompNode::Kind::Set: {
            std::string s = "set[" + render_loc(m->loc, uni) + "](" + value(m->val) + "). " + comp(m->comp, true);
            return tail ? s : "(" + s + ")";
        }
        case CompNode::Kind::Bind: {
            std::string fn = m->val->kind == ValueNode::Kind::Var || !tail ? value_atom(m->val) : value(m->val);
            return comp(m->comp, false) + (uni ? " \xE2\x9F\xAB= " : " >>= ") + fn;
        }
        }
        return "?";
    }

    std::string store(const Store& s) const {
        if (s->kind == StoreNode::Kind::Emp) return "emp";
        return "upd(" + render_loc(s->loc, uni) + ", " + lookup(s->entry) + ", " + store(s->rest) + ")";
    }

    std::string lookup(const Lookup& u) const {
        if (u->kind == LookupNode::Kind::Val) return value(u->val);
        return "lkp(" + render_loc(u->loc, uni) + ", " + store(u->store) + ")";
    }

    // 0: arrow, 1: product, 2: intersection, 3: atom
    std::string type(const Raw& t, int level) const {
        auto paren = [&](int need, std::string s) { return level > need ? "(" + s + ")" : s; };
        switch (t->kind) {
        case RawNode::Kind::Omega: {
            static const char* names = "DSCT";
            return (uni ? std::string("\xCF\x89") : std::string("w")) + names[static_cast<int>(t->sort)];
        }
        case RawNode::Kind::Arrow:
            return paren(0, type(t->a, 1) + (uni ? " \xE2\x86\x92 " : " -> ") + type(t->b, 0));
        case RawNode::Kind::Prod: return paren(1, type(t->a, 2) + (uni ? " \xC3\x97 " : " x ") + type(t->b, 2));
        case RawNode::Kind::Meet: return paren(2, type(t->a, 3) + (uni ? " \xE2\x88\xA7 " : " /\\ ") + type(t->b, 2));
        case RawNode::Kind::Rec:
            return (uni ? "\xE2\x9F\xA8" : "<") + render_loc(t->loc, uni) + " : " + type(t->a, 0) +
                   (uni ? "\xE2\x9F\xA9" : ">");
        }
        return "?";
    }
};

}  // namespace

std::string render_loc(Loc l, bool unicode) { return (unicode ? "\xE2\x84\x93" : "l") + std::to_string(l); }
std::string render(const Value& v, bool unicode) { return Printer{unicode}.value(v); }
std::string render(const Comp& m, bool unicode) { return Printer{unicode}.comp(m, true); }
std::string render(const Store& s, bool unicode) { return Printer{unicode}.store(s); }
std::string render(const Lookup& u, bool unicode) { return Printer{unicode}.lookup(u); }
std::string render(const Raw& t, bool unicode) { return Printer{unicode}.type(t, 0); }
std::string render(const Type& t, bool unicode) { return render(to_raw(t), unicode); }
std::string render(const Configuration& c, bool unicode) {
    return "(" + render(c.comp, unicode) + ", " + render(c.store, unicode) + ")";
}

}  // namespace limp
