// test_tree.cpp - pika PEG parser tests
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "random_grammar.hpp"
#include "test_common.hpp"

#include <pika/bench.hpp>
#include <pika/serialize.hpp>
#include <pika/tree.hpp>
#include <pika/unicode.hpp>

#include <doctest.h>

#include <functional>

using namespace pika;
using namespace pika::testing;

namespace {

Grammar from_source(const std::string& text, BuildOptions options = {})
{
    return build_grammar(rewrite_precedence_hierarchy(parse_grammar_source(text)), options);
}

ParseTreeNode tree_of(const MemoTable& t, const std::string& rule)
{
    auto tree = extract_parse_tree(t, rule, 0);
    REQUIRE(tree);
    return *tree;
}

std::string names(const std::vector<ParseTreeNode>& nodes)
{
    std::string s;
    for (const ParseTreeNode& n : nodes)
        s += n.name + "@" + std::to_string(n.start) + " ";
    return s;
}

// Children of a node tile its span, except under lookahead.
void check_tiling(const ParseTreeNode& n)
{
    if (n.children.empty())
        return;
    Pos at = n.start;
    for (const ParseTreeNode& c : n.children) {
        CHECK(c.start == at);
        at += c.len;
        check_tiling(c);
    }
    CHECK(at == n.start + n.len);
}

void labeled_preorder(const ParseTreeNode& n, std::vector<std::pair<std::string, Pos>>& out)
{
    if (!n.label.empty())
        out.emplace_back(n.label, n.start);
    for (const ParseTreeNode& c : n.children)
        labeled_preorder(c, out);
}

void ast_preorder(const AstNode& n, std::vector<std::pair<std::string, Pos>>& out)
{
    if (!n.synthetic)
        out.emplace_back(n.label, n.start);
    for (const AstNode& c : n.children)
        ast_preorder(c, out);
}

void check_ast_order(const AstNode& n, std::u32string_view input)
{
    CHECK(n.text == encode_utf8(input.substr(n.start, n.len)));
    Pos at = n.start;
    for (const AstNode& c : n.children) {
        CHECK(c.start >= at);
        at = c.start + c.len;
        check_ast_order(c, input);
    }
    CHECK(at <= n.start + n.len);
}

} // namespace

TEST_CASE("flattening a repetition chain")
{
    Grammar g = from_source("W <- [a-z]+;");
    MemoTable t = parse(g, U"hello");
    ParseTreeNode raw = tree_of(t, "W");
    CHECK(raw.children.size() == 2);
    ParseTreeNode flat = flatten_one_or_more(raw);
    REQUIRE(flat.children.size() == 5);
    std::string letters;
    for (const ParseTreeNode& c : flat.children) {
        CHECK(c.len == 1);
        letters += encode_utf8(t.input().substr(c.start, 1));
    }
    CHECK(letters == "hello");
    CHECK(flat.name == "W");
    CHECK(flat.len == 5);

    MemoTable one = parse(g, U"h");
    ParseTreeNode single = flatten_one_or_more(tree_of(one, "W"));
    CHECK(single.children.size() == 1);
}

TEST_CASE("flattening matches the naive repetition node")
{
    BuildOptions naive;
    naive.rewrite_one_or_more = false;
    std::string text = "S <- ('x' / 'y')+ 'z'; T <- ('a' 'b'+)*;";
    Grammar chain = from_source(text);
    Grammar flat = from_source(text, naive);
    for (std::u32string in : {U"xyxxz", U"yz", U"ababbbab"}) {
        std::string rule = in[0] == U'a' ? "T" : "S";
        ParseTreeNode a = flatten_one_or_more(tree_of(parse(chain, in), rule));
        ParseTreeNode b = tree_of(parse(flat, in), rule);
        check_tiling(a);
        check_tiling(b);
        // Shapes agree once the chain helper names are ignored.
        std::function<std::string(const ParseTreeNode&)> shape = [&](const ParseTreeNode& n) {
            std::string s = "(" + std::to_string(n.start) + " " + std::to_string(n.len);
            for (const ParseTreeNode& c : n.children)
                s += " " + shape(c);
            return s + ")";
        };
        CHECK(shape(a) == shape(b));
    }
}

TEST_CASE("flatten leaves trees without chains unchanged")
{
    Grammar g = from_source("E <- E ('+' / '-') T / T; T <- [a-z] / '(' E ')';");
    MemoTable t = parse(g, U"a+(b-c)");
    ParseTreeNode tree = tree_of(t, "E");
    CHECK(to_sexpr(flatten_one_or_more(tree)) == to_sexpr(tree));
}

TEST_CASE("nested repetitions flatten independently")
{
    Grammar g = from_source("S <- ('a' [0-9]+)+;");
    MemoTable t = parse(g, U"a12a3a456");
    ParseTreeNode flat = flatten_one_or_more(tree_of(t, "S"));
    REQUIRE(flat.children.size() == 3);
    std::vector<std::size_t> digits;
    for (const ParseTreeNode& item : flat.children) {
        REQUIRE(item.children.size() == 2);
        digits.push_back(item.children[1].children.size());
    }
    CHECK(digits == std::vector<std::size_t>{2, 1, 3});
}

TEST_CASE("AST from labels")
{
    Grammar g = from_source("Sum <- left:Term '+' right:Term; Term <- [a-z];");
    MemoTable t = parse(g, U"a+b");
    auto ast = to_ast(tree_of(t, "Sum"), t.input());
    REQUIRE(ast);
    CHECK(ast->synthetic);
    CHECK(to_sexpr(*ast) == R"((<root> (left "a") (right "b")))");
    CHECK(ast->text == "a+b");

    Grammar labeled = from_source("S <- top:(x:'a' 'b');");
    MemoTable t2 = parse(labeled, U"ab");
    auto one = to_ast(tree_of(t2, "S"), t2.input());
    REQUIRE(one);
    CHECK(!one->synthetic);
    CHECK(to_sexpr(*one) == R"((top (x "a")))");

    Grammar plain = from_source("S <- 'a' 'b';");
    MemoTable t3 = parse(plain, U"ab");
    CHECK(!to_ast(tree_of(t3, "S"), t3.input()));
}

TEST_CASE("rule labels apply where the rule is referenced")
{
    Grammar g = load("assign.peg");
    MemoTable t = parse(g, U"x=1+y;");
    auto ast = to_ast(flatten_one_or_more(tree_of(t, "Program")), t.input());
    REQUIRE(ast);
    std::vector<std::pair<std::string, Pos>> seen;
    ast_preorder(*ast, seen);
    REQUIRE(!seen.empty());
    std::vector<std::pair<std::string, Pos>> want{{"add", 2}, {"num", 2}, {"var", 4}};
    CHECK(seen == want);
}

TEST_CASE("extract_parse_tree")
{
    Grammar g = load("expr.peg");
    MemoTable t = parse(g, U"1*2+3*4");
    ParseTreeNode tree = tree_of(t, "E0");
    CHECK(tree.len == 7);
    CHECK(tree.name == "E0");

    MemoTable bad = parse(g, U"+");
    CHECK(!extract_parse_tree(bad, "E0", 0));
    CHECK(!extract_parse_tree(t, "E0", 99));
    CHECK_THROWS_AS(extract_parse_tree(t, "Nope", 0), GrammarError);

    Grammar opt = from_source("S <- 'a'*;");
    MemoTable t2 = parse(opt, U"aa");
    auto at_end = extract_parse_tree(t2, "S", 2);
    REQUIRE(at_end);
    CHECK(at_end->len == 0);
    CHECK(at_end->start == 2);
}

TEST_CASE("anonymous nodes are named by clause text and carry edge labels")
{
    Grammar g = from_source("S <- x:'a' ('b' / y:'c');");
    MemoTable t = parse(g, U"ac");
    ParseTreeNode tree = tree_of(t, "S");
    REQUIRE(tree.children.size() == 2);
    CHECK(tree.children[0].label == "x");
    CHECK(tree.children[0].name == "'a'");
    REQUIRE(tree.children[1].children.size() == 1);
    CHECK(tree.children[1].children[0].label == "y");
    CHECK(names(tree.children) == "'a'@0 'b' / y:'c'@1 ");
}

TEST_CASE("span conservation, AST order and elision on generated inputs")
{
    Grammar g = load("expr.peg");
    GenOptions o;
    o.count = 60;
    o.max_depth = 7;
    o.seed = 9;
    for (const std::string& s : generate_expressions(o)) {
        std::u32string in = decode_utf8(s);
        MemoTable t = parse(g, in);
        ParseTreeNode tree = tree_of(t, "E0");
        check_tiling(tree);
        ParseTreeNode flat = flatten_one_or_more(tree);
        check_tiling(flat);
        CHECK(to_sexpr(flatten_one_or_more(flat)) == to_sexpr(flat));
    }

    Grammar a = load("assign.peg");
    std::mt19937_64 rng(10);
    for (int i = 0; i < 100; ++i) {
        std::string src;
        int n = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < n; ++k)
            src += std::string(1, static_cast<char>('a' + rng() % 3)) + "=" + generate_expressions({1, 5, rng()})[0]
                + ";";
        std::u32string in = decode_utf8(src);
        MemoTable t = parse(a, in);
        ParseTreeNode tree = flatten_one_or_more(tree_of(t, "Program"));
        CHECK(tree.len == in.size());
        check_tiling(tree);
        auto ast = to_ast(tree, in);
        REQUIRE(ast);
        check_ast_order(*ast, in);
        std::vector<std::pair<std::string, Pos>> want, got;
        labeled_preorder(tree, want);
        ast_preorder(*ast, got);
        CHECK(got == want);
    }
}

TEST_CASE("JSON and sexpr output")
{
    Grammar g = from_source("S <- x:'a' 'b';");
    MemoTable t = parse(g, U"ab");
    ParseTreeNode tree = tree_of(t, "S");
    CHECK(to_sexpr(tree) == R"((S 0 2 (x:"'a'" 0 1) ("'b'" 1 1)))");
    nlohmann::ordered_json j = to_json(tree);
    CHECK(j["name"] == "S");
    CHECK(j["label"].is_null());
    CHECK(j["children"][0]["label"] == "x");
    CHECK(j.dump() == R"({"name":"S","label":null,"start":0,"len":2,"children":[{"name":"'a'","label":"x","start":0,"len":1,"children":[]},{"name":"'b'","label":null,"start":1,"len":1,"children":[]}]})");
}
