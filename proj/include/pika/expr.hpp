// expr.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_EXPR_HPP
#define PIKA_EXPR_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pika {

inline constexpr std::size_t no_position = static_cast<std::size_t>(-1);

// Character class: a set of inclusive ranges, optionally negated.
struct CharSet {
    std::vector<std::pair<char32_t, char32_t>> ranges;
    bool negated = false;

    bool contains(char32_t c) const;
    friend bool operator==(const CharSet&, const CharSet&) = default;
};

enum class ExprKind {
    Seq,
    First,
    OneOrMore,
    NotFollowedBy,
    Char,
    CharSet,
    String,
    Nothing,
    RuleRef,
    // Surface forms, removed by desugar().
    FollowedBy,
    Optional,
    ZeroOrMore,
};

const char* to_string(ExprKind kind);

// A grammar expression as written, before interning. RuleRef nodes name
// other rules; `label` is the AST label attached to this subexpression.
struct Expr {
    Expr() = default;
    explicit Expr(ExprKind k) : kind(k) {}

    ExprKind kind = ExprKind::Nothing;
    std::vector<Expr> children;
    std::string label;
    char32_t ch = 0;
    CharSet charset;
    std::u32string text;
    std::string ref_name;
    std::size_t source_pos = no_position;

    bool is_terminal() const;
    friend bool operator==(const Expr&, const Expr&);
};

enum class Associativity { Left, Right };

struct Rule {
    std::string name;
    Expr clause;
    std::optional<int> precedence;
    std::optional<Associativity> associativity;
    // Set by the OneOrMore rewrite on the helper rules it introduces.
    bool synthetic = false;
    // Set by the OneOrMore rewrite when the clause is a right-recursive list,
    // Y X? or (Y X?)?, so parse trees can be flattened back.
    bool one_or_more_chain = false;
    // Set by the precedence rewrite: bare-name alias of the lowest level,
    // and the lowest level itself.
    bool alias = false;
    bool lowest_precedence = false;
    std::size_t source_pos = no_position;

    const std::string& ast_label() const { return clause.label; }
};

// Renders in the grammar file notation; re-parsing yields an equal tree.
std::string to_string(const Expr& e);
std::string to_string(const Rule& r);

namespace expr {

Expr seq(std::vector<Expr> items);
Expr first(std::vector<Expr> items);
Expr one_or_more(Expr e);
Expr zero_or_more(Expr e);
Expr optional(Expr e);
Expr followed_by(Expr e);
Expr not_followed_by(Expr e);
Expr chr(char32_t c);
Expr range(char32_t lo, char32_t hi);
Expr charset(CharSet set);
Expr str(std::u32string s);
Expr nothing();
Expr ref(std::string name);
Expr labeled(std::string label, Expr e);

} // namespace expr

} // namespace pika

#endif // PIKA_EXPR_HPP
