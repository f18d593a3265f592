// meta_grammar.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/meta_grammar.hpp>
#include <pika/unicode.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace pika {

namespace {

bool is_ident_start(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char32_t c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

std::string describe(char32_t c)
{
    std::string s = "'";
    append_utf8(s, c);
    return s + "'";
}

Expr at(Expr e, std::size_t pos)
{
    e.source_pos = pos;
    return e;
}

class Parser {
public:
    explicit Parser(std::u32string text) : s_(std::move(text)) {}

    std::vector<Rule> parse_rules()
    {
        std::vector<Rule> rules;
        skip_ws();
        while (!at_end()) {
            rules.push_back(parse_rule());
            skip_ws();
        }
        return rules;
    }

private:
    [[noreturn]] void fail(const std::string& message, std::size_t pos) const
    {
        throw GrammarError(message, std::min(pos, s_.size()));
    }
    [[noreturn]] void fail(const std::string& message) const { fail(message, pos_); }

    bool at_end() const { return pos_ >= s_.size(); }
    char32_t peek(std::size_t ahead = 0) const
    {
        return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : char32_t(0);
    }
    bool peek_is(char32_t c) const { return !at_end() && s_[pos_] == c; }

    void skip_ws()
    {
        while (!at_end()) {
            char32_t c = s_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos_;
            } else if (c == '#') {
                while (!at_end() && s_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    void expect(char32_t c)
    {
        skip_ws();
        if (!peek_is(c))
            fail("expected " + describe(c) + (at_end() ? " at end of input" : " before " + describe(peek())));
        ++pos_;
    }

    std::string parse_ident()
    {
        if (at_end() || !is_ident_start(peek()))
            fail("expected a name");
        std::string name;
        while (!at_end() && is_ident_char(peek()))
            name.push_back(static_cast<char>(s_[pos_++]));
        return name;
    }

    // True if a rule header starts at the current position.
    bool at_rule_header() const
    {
        std::size_t p = pos_;
        if (p >= s_.size() || !is_ident_start(s_[p]))
            return false;
        while (p < s_.size() && is_ident_char(s_[p]))
            ++p;
        while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t' || s_[p] == '\n' || s_[p] == '\r'))
            ++p;
        if (p < s_.size() && s_[p] == '[') {
            // Name[digits] or Name[digits,L|R], as opposed to a character class.
            ++p;
            bool digits = false;
            while (p < s_.size() && (s_[p] == ' ' || (s_[p] >= '0' && s_[p] <= '9'))) {
                digits = digits || s_[p] != ' ';
                ++p;
            }
            if (!digits)
                return false;
            if (p < s_.size() && s_[p] == ',') {
                ++p;
                while (p < s_.size() && s_[p] == ' ')
                    ++p;
                if (p >= s_.size() || (s_[p] != 'L' && s_[p] != 'R'))
                    return false;
                ++p;
                while (p < s_.size() && s_[p] == ' ')
                    ++p;
            }
            if (p >= s_.size() || s_[p] != ']')
                return false;
            ++p;
            while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t' || s_[p] == '\n' || s_[p] == '\r'))
                ++p;
        }
        return p + 1 < s_.size() && s_[p] == '<' && s_[p + 1] == '-';
    }

    Rule parse_rule()
    {
        Rule r;
        r.source_pos = pos_;
        r.name = parse_ident();
        skip_ws();
        if (peek_is('[')) {
            ++pos_;
            skip_ws();
            r.precedence = parse_int();
            skip_ws();
            if (peek_is(',')) {
                ++pos_;
                skip_ws();
                if (peek_is('L'))
                    r.associativity = Associativity::Left;
                else if (peek_is('R'))
                    r.associativity = Associativity::Right;
                else
                    fail("expected L or R");
                ++pos_;
            }
            expect(']');
            skip_ws();
        }
        if (!(peek() == '<' && peek(1) == '-'))
            fail("expected '<-' after rule name '" + r.name + "'");
        pos_ += 2;
        r.clause = parse_first();
        expect(';');
        return r;
    }

    int parse_int()
    {
        std::size_t start = pos_;
        long value = 0;
        while (!at_end() && peek() >= '0' && peek() <= '9') {
            value = value * 10 + (s_[pos_++] - '0');
            if (value > 1000000)
                fail("precedence level too large", start);
        }
        if (pos_ == start)
            fail("expected a precedence level");
        return static_cast<int>(value);
    }

    Expr parse_first()
    {
        skip_ws();
        std::size_t start = pos_;
        std::vector<Expr> alts;
        alts.push_back(parse_seq());
        skip_ws();
        while (peek_is('/')) {
            ++pos_;
            alts.push_back(parse_seq());
            skip_ws();
        }
        if (alts.size() == 1)
            return std::move(alts[0]);
        return at(expr::first(std::move(alts)), start);
    }

    Expr parse_seq()
    {
        skip_ws();
        std::size_t start = pos_;
        std::vector<Expr> items;
        while (true) {
            skip_ws();
            if (at_end() || peek_is(';') || peek_is('/') || peek_is(')'))
                break;
            if (at_rule_header())
                fail("expected ';' before the next rule");
            items.push_back(parse_prefix());
        }
        if (items.empty())
            fail("expected an expression");
        if (items.size() == 1)
            return std::move(items[0]);
        return at(expr::seq(std::move(items)), start);
    }

    Expr parse_prefix()
    {
        skip_ws();
        std::size_t start = pos_;
        if (peek_is('!')) {
            ++pos_;
            return at(expr::not_followed_by(parse_prefix()), start);
        }
        if (peek_is('&')) {
            ++pos_;
            return at(expr::followed_by(parse_prefix()), start);
        }
        if (is_ident_start(peek())) {
            std::string name = parse_ident();
            skip_ws();
            if (peek_is(':')) {
                ++pos_;
                Expr e = parse_prefix();
                if (!e.label.empty())
                    fail("expression already has label '" + e.label + "'", start);
                e.label = std::move(name);
                return e;
            }
            pos_ = start;
        }
        return parse_suffix();
    }

    Expr parse_suffix()
    {
        std::size_t start = pos_;
        Expr e = parse_primary();
        while (true) {
            skip_ws();
            if (peek_is('+'))
                e = at(expr::one_or_more(std::move(e)), start);
            else if (peek_is('*'))
                e = at(expr::zero_or_more(std::move(e)), start);
            else if (peek_is('?'))
                e = at(expr::optional(std::move(e)), start);
            else
                break;
            ++pos_;
        }
        return e;
    }

    Expr parse_primary()
    {
        skip_ws();
        std::size_t start = pos_;
        if (at_end())
            fail("expected an expression at end of input");
        char32_t c = peek();
        if (c == '(') {
            ++pos_;
            skip_ws();
            if (peek_is(')')) {
                ++pos_;
                return at(expr::nothing(), start);
            }
            Expr e = parse_first();
            expect(')');
            return e;
        }
        if (c == '\'' || c == '"')
            return parse_literal();
        if (c == '[')
            return parse_class();
        if (is_ident_start(c))
            return at(expr::ref(parse_ident()), start);
        fail("unexpected " + describe(c));
    }

    char32_t parse_escape()
    {
        std::size_t start = pos_;
        ++pos_; // backslash
        if (at_end())
            fail("unterminated escape", start);
        char32_t c = s_[pos_++];
        switch (c) {
        case 'n': return '\n';
        case 'r': return '\r';
        case 't': return '\t';
        case '\\':
        case '\'':
        case '"':
        case '[':
        case ']':
        case '^':
        case '-':
            return c;
        case 'u': {
            char32_t v = 0;
            for (int i = 0; i < 4; ++i) {
                char32_t h = peek();
                int d;
                if (h >= '0' && h <= '9')
                    d = static_cast<int>(h - '0');
                else if (h >= 'a' && h <= 'f')
                    d = static_cast<int>(h - 'a' + 10);
                else if (h >= 'A' && h <= 'F')
                    d = static_cast<int>(h - 'A' + 10);
                else
                    fail("expected four hex digits after \\u", start);
                v = v * 16 + static_cast<char32_t>(d);
                ++pos_;
            }
            return v;
        }
        default:
            fail("unknown escape \\" + encode_utf8(std::u32string(1, c)), start);
        }
    }

    Expr parse_literal()
    {
        std::size_t start = pos_;
        char32_t quote = s_[pos_++];
        std::u32string text;
        while (true) {
            if (at_end() || peek() == '\n')
                fail("unterminated literal", start);
            char32_t c = peek();
            if (c == quote) {
                ++pos_;
                break;
            }
            text.push_back(c == '\\' ? parse_escape() : s_[pos_++]);
        }
        if (text.empty())
            fail("empty literal; use () to match nothing", start);
        if (text.size() == 1)
            return at(expr::chr(text[0]), start);
        return at(expr::str(std::move(text)), start);
    }

    char32_t class_char(std::size_t start)
    {
        if (at_end())
            fail("unterminated character class", start);
        return peek() == '\\' ? parse_escape() : s_[pos_++];
    }

    Expr parse_class()
    {
        std::size_t start = pos_;
        ++pos_;
        CharSet set;
        if (peek_is('^')) {
            set.negated = true;
            ++pos_;
        }
        while (true) {
            if (at_end())
                fail("unterminated character class", start);
            if (peek() == ']')
                break;
            char32_t lo = class_char(start);
            char32_t hi = lo;
            if (peek_is('-') && peek(1) != ']' && pos_ + 1 < s_.size()) {
                ++pos_;
                hi = class_char(start);
                if (hi < lo)
                    fail("reversed range in character class", start);
            }
            set.ranges.emplace_back(lo, hi);
        }
        ++pos_;
        if (set.ranges.empty())
            fail("empty character class", start);
        return at(expr::charset(std::move(set)), start);
    }

    std::u32string s_;
    std::size_t pos_ = 0;
};

// Replaces references to `name` in preorder; `replace` gets the occurrence index.
void replace_refs(Expr& e, const std::string& name, int& occurrence, const std::function<Expr(Expr, int)>& replace)
{
    if (e.kind == ExprKind::RuleRef && e.ref_name == name) {
        e = replace(std::move(e), occurrence++);
        return;
    }
    for (Expr& c : e.children)
        replace_refs(c, name, occurrence, replace);
}

int count_refs(const Expr& e, const std::string& name)
{
    int n = e.kind == ExprKind::RuleRef && e.ref_name == name ? 1 : 0;
    for (const Expr& c : e.children)
        n += count_refs(c, name);
    return n;
}

std::string level_name(const std::string& name, int p) { return name + "[" + std::to_string(p) + "]"; }

Expr ref_at(const std::string& name, std::size_t pos)
{
    Expr r = expr::ref(name);
    r.source_pos = pos;
    return r;
}

} // namespace

std::vector<Rule> parse_grammar_source(std::string_view text)
{
    return Parser(decode_utf8(text)).parse_rules();
}

std::vector<Rule> rewrite_precedence_hierarchy(std::vector<Rule> rules)
{
    std::map<std::string, std::vector<std::size_t>> groups;
    std::set<std::string> plain;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (rules[i].precedence)
            groups[rules[i].name].push_back(i);
        else
            plain.insert(rules[i].name);
    }
    for (const auto& [name, members] : groups) {
        if (plain.count(name))
            throw GrammarError("duplicate rule name '" + name + "'", rules[members.front()].source_pos);
    }

    std::vector<Rule> rewritten(rules.size());
    std::map<std::string, std::size_t> last_member;
    for (auto& [name, members] : groups) {
        std::vector<std::size_t> by_level = members;
        std::stable_sort(by_level.begin(), by_level.end(),
                         [&](std::size_t a, std::size_t b) { return *rules[a].precedence < *rules[b].precedence; });
        for (std::size_t i = 1; i < by_level.size(); ++i) {
            const Rule& r = rules[by_level[i]];
            if (*r.precedence == *rules[by_level[i - 1]].precedence) {
                throw GrammarError("duplicate precedence level " + std::to_string(*r.precedence) + " for rule '"
                                       + name + "'",
                                   r.source_pos);
            }
        }
        std::size_t k = by_level.size() - 1;
        for (std::size_t i = 0; i <= k; ++i) {
            Rule r = rules[by_level[i]];
            std::string cur = level_name(name, *r.precedence);
            std::string next = level_name(name, *rules[by_level[i == k ? 0 : i + 1]].precedence);
            bool highest = i == k;
            int count = count_refs(r.clause, name);
            if (r.associativity && count < 2) {
                throw GrammarError("associativity given for rule '" + cur + "' with fewer than two self-references",
                                   r.source_pos);
            }
            int occurrence = 0;
            replace_refs(r.clause, name, occurrence, [&](Expr ref, int j) {
                std::size_t pos = ref.source_pos;
                Expr out;
                if (count >= 2) {
                    bool keep = (r.associativity == Associativity::Left && j == 0)
                        || (r.associativity == Associativity::Right && j == count - 1);
                    out = ref_at(keep ? cur : next, pos);
                } else if (highest) {
                    out = ref_at(next, pos);
                } else {
                    out = expr::first({ref_at(cur, pos), ref_at(next, pos)});
                    out.source_pos = pos;
                }
                out.label = std::move(ref.label);
                return out;
            });
            if (!highest) {
                std::size_t pos = r.clause.source_pos;
                r.clause = expr::first({std::move(r.clause), ref_at(next, pos)});
                r.clause.source_pos = pos;
            }
            r.name = cur;
            r.lowest_precedence = i == 0;
            rewritten[by_level[i]] = std::move(r);
        }
        last_member[name] = *std::max_element(members.begin(), members.end());
    }

    std::vector<Rule> out;
    out.reserve(rules.size() + groups.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (!rules[i].precedence) {
            out.push_back(std::move(rules[i]));
            continue;
        }
        out.push_back(std::move(rewritten[i]));
        const std::string& name = rules[i].name;
        if (last_member.at(name) == i) {
            const auto& members = groups.at(name);
            int lowest = *rules[members.front()].precedence;
            for (std::size_t m : members)
                lowest = std::min(lowest, *rules[m].precedence);
            Rule alias;
            alias.name = name;
            alias.clause = ref_at(level_name(name, lowest), rules[i].source_pos);
            alias.alias = true;
            alias.source_pos = rules[i].source_pos;
            out.push_back(std::move(alias));
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset)
{
    std::u32string chars = decode_utf8(text);
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < chars.size(); ++i) {
        if (chars[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

Grammar compile_grammar(std::string_view text, const BuildOptions& options, std::string_view origin)
{
    try {
        return build_grammar(rewrite_precedence_hierarchy(parse_grammar_source(text)), options);
    } catch (const GrammarError& e) {
        std::string prefix(origin);
        if (e.position() != no_position) {
            auto [line, col] = line_column(text, e.position());
            prefix += ':' + std::to_string(line) + ':' + std::to_string(col);
        }
        throw GrammarError(prefix + ": " + e.what(), e.position());
    }
}

} // namespace pika
