// expr.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/expr.hpp>
#include <pika/unicode.hpp>

#include <cstdio>

namespace pika {

bool CharSet::contains(char32_t c) const
{
    bool in = false;
    for (auto [lo, hi] : ranges) {
        if (c >= lo && c <= hi) {
            in = true;
            break;
        }
    }
    return in != negated;
}

const char* to_string(ExprKind kind)
{
    switch (kind) {
    case ExprKind::Seq: return "Seq";
    case ExprKind::First: return "First";
    case ExprKind::OneOrMore: return "OneOrMore";
    case ExprKind::NotFollowedBy: return "NotFollowedBy";
    case ExprKind::Char: return "Char";
    case ExprKind::CharSet: return "CharSet";
    case ExprKind::String: return "String";
    case ExprKind::Nothing: return "Nothing";
    case ExprKind::RuleRef: return "RuleRef";
    case ExprKind::FollowedBy: return "FollowedBy";
    case ExprKind::Optional: return "Optional";
    case ExprKind::ZeroOrMore: return "ZeroOrMore";
    }
    return "?";
}

bool Expr::is_terminal() const
{
    return kind == ExprKind::Char || kind == ExprKind::CharSet || kind == ExprKind::String
        || kind == ExprKind::Nothing;
}

bool operator==(const Expr& a, const Expr& b)
{
    return a.kind == b.kind && a.label == b.label && a.ch == b.ch && a.charset == b.charset
        && a.text == b.text && a.ref_name == b.ref_name && a.children == b.children;
}

namespace {

void append_escaped(std::string& out, char32_t c, bool in_class)
{
    switch (c) {
    case '\n': out += "\\n"; return;
    case '\r': out += "\\r"; return;
    case '\t': out += "\\t"; return;
    case '\\': out += "\\\\"; return;
    default: break;
    }
    if (!in_class && c == '\'') {
        out += "\\'";
        return;
    }
    if (in_class && (c == ']' || c == '^')) {
        out += '\\';
        out += static_cast<char>(c);
        return;
    }
    if (c < 0x20 || c == 0x7F || (in_class && c == '-')) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(c));
        out += buf;
        return;
    }
    append_utf8(out, c);
}

// Binding strength: 0 = First, 1 = Seq, 2 = prefix/label, 3 = suffix/primary.
int binding(const Expr& e)
{
    if (!e.label.empty())
        return 2;
    switch (e.kind) {
    case ExprKind::First: return 0;
    case ExprKind::Seq: return 1;
    case ExprKind::NotFollowedBy:
    case ExprKind::FollowedBy: return 2;
    default: return 3;
    }
}

void print(std::string& out, const Expr& e, bool with_label = true);

void print_operand(std::string& out, const Expr& e, int min_binding)
{
    if (binding(e) < min_binding) {
        out += '(';
        print(out, e);
        out += ')';
    } else {
        print(out, e);
    }
}

void print(std::string& out, const Expr& e, bool with_label)
{
    if (with_label && !e.label.empty()) {
        out += e.label;
        out += ':';
        if (binding(Expr{e.kind}) < 2) {
            out += '(';
            print(out, e, false);
            out += ')';
        } else {
            print(out, e, false);
        }
        return;
    }
    switch (e.kind) {
    case ExprKind::Seq:
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            if (i)
                out += ' ';
            print_operand(out, e.children[i], 2);
        }
        break;
    case ExprKind::First:
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            if (i)
                out += " / ";
            print_operand(out, e.children[i], 1);
        }
        break;
    case ExprKind::OneOrMore:
        print_operand(out, e.children[0], 3);
        out += '+';
        break;
    case ExprKind::ZeroOrMore:
        print_operand(out, e.children[0], 3);
        out += '*';
        break;
    case ExprKind::Optional:
        print_operand(out, e.children[0], 3);
        out += '?';
        break;
    case ExprKind::NotFollowedBy:
        out += '!';
        print_operand(out, e.children[0], e.children[0].label.empty() ? 2 : 3);
        break;
    case ExprKind::FollowedBy:
        out += '&';
        print_operand(out, e.children[0], e.children[0].label.empty() ? 2 : 3);
        break;
    case ExprKind::Char:
        out += '\'';
        append_escaped(out, e.ch, false);
        out += '\'';
        break;
    case ExprKind::String:
        out += '\'';
        for (char32_t c : e.text)
            append_escaped(out, c, false);
        out += '\'';
        break;
    case ExprKind::CharSet:
        out += '[';
        if (e.charset.negated)
            out += '^';
        for (auto [lo, hi] : e.charset.ranges) {
            append_escaped(out, lo, true);
            if (hi != lo) {
                out += '-';
                append_escaped(out, hi, true);
            }
        }
        out += ']';
        break;
    case ExprKind::Nothing:
        out += "()";
        break;
    case ExprKind::RuleRef:
        out += e.ref_name;
        break;
    }
}

Expr unary(ExprKind kind, Expr e)
{
    Expr out{kind};
    out.children.push_back(std::move(e));
    return out;
}

} // namespace

std::string to_string(const Expr& e)
{
    std::string out;
    print(out, e);
    return out;
}

std::string to_string(const Rule& r)
{
    std::string out = r.name;
    // Rules expanded from a precedence group already carry the level in their name.
    if (r.precedence && r.name.find('[') == std::string::npos) {
        out += '[' + std::to_string(*r.precedence);
        if (r.associativity)
            out += *r.associativity == Associativity::Left ? ",L" : ",R";
        out += ']';
    }
    out += " <- ";
    print(out, r.clause);
    out += ';';
    return out;
}

namespace expr {

Expr seq(std::vector<Expr> items)
{
    Expr e{ExprKind::Seq};
    e.children = std::move(items);
    return e;
}

Expr first(std::vector<Expr> items)
{
    Expr e{ExprKind::First};
    e.children = std::move(items);
    return e;
}

Expr one_or_more(Expr e) { return unary(ExprKind::OneOrMore, std::move(e)); }
Expr zero_or_more(Expr e) { return unary(ExprKind::ZeroOrMore, std::move(e)); }
Expr optional(Expr e) { return unary(ExprKind::Optional, std::move(e)); }
Expr followed_by(Expr e) { return unary(ExprKind::FollowedBy, std::move(e)); }
Expr not_followed_by(Expr e) { return unary(ExprKind::NotFollowedBy, std::move(e)); }

Expr chr(char32_t c)
{
    Expr e{ExprKind::Char};
    e.ch = c;
    return e;
}

Expr range(char32_t lo, char32_t hi)
{
    Expr e{ExprKind::CharSet};
    e.charset.ranges.emplace_back(lo, hi);
    return e;
}

Expr charset(CharSet set)
{
    Expr e{ExprKind::CharSet};
    e.charset = std::move(set);
    return e;
}

Expr str(std::u32string s)
{
    Expr e{ExprKind::String};
    e.text = std::move(s);
    return e;
}

Expr nothing() { return Expr{ExprKind::Nothing}; }

Expr ref(std::string name)
{
    Expr e{ExprKind::RuleRef};
    e.ref_name = std::move(name);
    return e;
}

Expr labeled(std::string label, Expr e)
{
    e.label = std::move(label);
    return e;
}

} // namespace expr

} // namespace pika
