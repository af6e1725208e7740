#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "limp/errors.hpp"
#include "limp/operational.hpp"
#include "limp/store.hpp"
#include "limp/syntax.hpp"
#include "limp/types.hpp"

namespace limp {

struct SourceSpan {
    std::size_t begin = 0, end = 0;  // byte offsets
    unsigned line = 1, column = 1;
};

class ParseError : public Error {
public:
    ParseError(SourceSpan span, std::vector<std::string> expected, const std::string& found);
    SourceSpan span;
    std::vector<std::string> expected;
};

struct Token {
    enum class Kind {
        Ident,
        Lambda,  // \ or λ
        Dot,
        LParen,
        RParen,
        LBracket,
        RBracket,
        LBrace,
        RBrace,
        Langle,
        Rangle,
        Comma,
        Semi,
        Equals,
        Bind,   // >>=
        Arrow,  // ->
        Meet,   // /\ or ∧
        Times,  // ×  (the ASCII product operator is the identifier x)
        Colon,
        Minus,
        Turnstile,  // |-
        End,
    };
    Kind kind;
    std::string text;
    SourceSpan span;
};

std::vector<Token> tokenize(const std::string& src);

// A parsed term that may be of either sort.
struct Expr {
    Value value;  // exactly one of value / comp is set
    Comp comp;
};

class Parser {
public:
    explicit Parser(const std::string& src);

    Value value();
    Comp comp();
    Store store();
    Lookup lookup();
    Raw type();
    Configuration config();
    Expr expr();
    Loc location();

    const Token& peek(std::size_t ahead = 0) const;
    bool at(Token::Kind k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
    bool at_word(const std::string& w, std::size_t ahead = 0) const;
    bool accept(Token::Kind k);
    bool accept_word(const std::string& w);
    const Token& expect(Token::Kind k, const std::string& what);
    void expect_word(const std::string& w);
    std::string identifier();
    void expect_end();
    [[noreturn]] void fail(const std::vector<std::string>& expected) const;
    std::size_t mark() const { return pos_; }
    void reset(std::size_t p) { pos_ = p; }

private:
    Expr seq_expr();
    Expr bind_expr();
    Expr app_expr();
    bool at_primary() const;
    Expr primary();
    Value fn_value();
    Comp as_comp(const Expr& e, const Token& where) const;
    Value as_value(const Expr& e, const Token& where) const;
    Lookup entry();
    Raw type_prod();
    Raw type_meet();
    Raw type_atom();

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

bool is_keyword(const std::string& w);

Value parse_value(const std::string& src);
Comp parse_comp(const std::string& src);
Store parse_store(const std::string& src);
Lookup parse_lookup(const std::string& src);
Raw parse_type(const std::string& src);
Configuration parse_config(const std::string& src);

std::string render(const Value& v, bool unicode = false);
std::string render(const Comp& m, bool unicode = false);
std::string render(const Store& s, bool unicode = false);
std::string render(const Lookup& u, bool unicode = false);
std::string render(const Raw& t, bool unicode = false);
std::string render(const Type& t, bool unicode = false);
std::string render(const Configuration& c, bool unicode = false);
std::string render_loc(Loc l, bool unicode = false);

}  // namespace limp
