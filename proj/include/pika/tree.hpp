// tree.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_TREE_HPP
#define PIKA_TREE_HPP

#include <pika/memo_table.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pika {

struct ParseTreeNode {
    // Rule name, or the clause text for anonymous subclauses.
    std::string name;
    std::string label;
    Pos start = 0;
    Pos len = 0;
    const Clause* clause = nullptr;
    std::vector<ParseTreeNode> children;
};

struct AstNode {
    std::string label;
    Pos start = 0;
    Pos len = 0;
    // Covered input, UTF-8.
    std::string text;
    std::vector<AstNode> children;
    // Unlabeled root holding several labeled top-level nodes.
    bool synthetic = false;
};

// Materializes the tree below `match`.
ParseTreeNode build_parse_tree(const Match& match, std::string name, std::string label);

// Tree of the best match of `rule_name` at `pos`, or nullopt if it does not
// match there. Throws GrammarError for unknown rules.
std::optional<ParseTreeNode> extract_parse_tree(const MemoTable& table, std::string_view rule_name, Pos pos);

// Collapses right-recursive repetition chains Y (Y (Y ...)) into one node
// holding the Y nodes in order. Other nodes are unchanged.
ParseTreeNode flatten_one_or_more(ParseTreeNode node);

// Labeled nodes become AST nodes; unlabeled nodes are replaced by their
// processed children. Several labeled top-level nodes are gathered under a
// synthetic root. nullopt if the tree has no labels.
std::optional<AstNode> to_ast(const ParseTreeNode& root, std::u32string_view input);

} // namespace pika

#endif // PIKA_TREE_HPP
