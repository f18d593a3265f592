// tree.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/tree.hpp>
#include <pika/unicode.hpp>

namespace pika {

namespace {

const std::string& edge_label(const Match& parent, std::size_t child)
{
    const Clause& c = *parent.clause;
    std::size_t i = child;
    if (c.kind == ClauseKind::First)
        i = parent.first_idx;
    else if (c.kind == ClauseKind::OneOrMore)
        i = 0;
    return c.sub_clause_labels[i];
}

} // namespace

ParseTreeNode build_parse_tree(const Match& match, std::string name, std::string label)
{
    ParseTreeNode node;
    node.name = std::move(name);
    node.label = std::move(label);
    node.start = match.start;
    node.len = match.len;
    node.clause = match.clause;
    node.children.reserve(match.children.size());
    for (std::size_t i = 0; i < match.children.size(); ++i) {
        const Match& child = *match.children[i];
        node.children.push_back(build_parse_tree(child, child.clause->name, edge_label(match, i)));
    }
    return node;
}

std::optional<ParseTreeNode> extract_parse_tree(const MemoTable& table, std::string_view rule_name, Pos pos)
{
    const GrammarRule& rule = table.grammar().rule(rule_name);
    if (pos > table.input().size())
        return std::nullopt;
    const Match* m = table.look_up_best_match(*rule.clause, pos);
    if (!m)
        return std::nullopt;
    return build_parse_tree(*m, rule.name, rule.ast_label);
}

ParseTreeNode flatten_one_or_more(ParseTreeNode node)
{
    // An unflattened link has the optional tail as its second child; a node
    // that was already flattened has a repeated item there instead.
    if (node.clause && node.clause->one_or_more_chain && node.children.size() == 2
        && node.children[1].clause == node.clause->sub_clauses[1]) {
        const Clause* chain = node.clause;
        std::vector<ParseTreeNode> items;
        ParseTreeNode* link = &node;
        while (true) {
            items.push_back(std::move(link->children[0]));
            // Follow the optional tail through single-child wrappers to the
            // next link of the same chain, if any.
            ParseTreeNode* t = &link->children[1];
            while (t->clause != chain && t->children.size() == 1)
                t = &t->children[0];
            if (t->clause != chain || t->children.size() != 2 || t->children[1].clause != chain->sub_clauses[1])
                break;
            link = t;
        }
        node.children.clear();
        for (ParseTreeNode& item : items)
            node.children.push_back(flatten_one_or_more(std::move(item)));
        return node;
    }
    for (ParseTreeNode& child : node.children)
        child = flatten_one_or_more(std::move(child));
    return node;
}

namespace {

void collect_ast(const ParseTreeNode& node, std::u32string_view input, std::vector<AstNode>& out)
{
    if (node.label.empty()) {
        for (const ParseTreeNode& child : node.children)
            collect_ast(child, input, out);
        return;
    }
    AstNode ast;
    ast.label = node.label;
    ast.start = node.start;
    ast.len = node.len;
    ast.text = encode_utf8(input.substr(node.start, node.len));
    for (const ParseTreeNode& child : node.children)
        collect_ast(child, input, ast.children);
    out.push_back(std::move(ast));
}

} // namespace

std::optional<AstNode> to_ast(const ParseTreeNode& root, std::u32string_view input)
{
    std::vector<AstNode> nodes;
    collect_ast(root, input, nodes);
    if (nodes.empty())
        return std::nullopt;
    if (nodes.size() == 1)
        return std::move(nodes[0]);
    AstNode top;
    top.start = root.start;
    top.len = root.len;
    top.text = encode_utf8(input.substr(root.start, root.len));
    top.children = std::move(nodes);
    top.synthetic = true;
    return top;
}

} // namespace pika
