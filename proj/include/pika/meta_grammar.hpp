// meta_grammar.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)
//
// Grammar file notation:
//
//   Rule   <- Clause ;                 # comment to end of line
//   Name[p] <- ... ;  Name[p,L] <- ... ;  Name[p,R] <- ... ;
//
//   a b        sequence              a / b      ordered choice
//   a+ a* a?   repetition, optional  !a &a      lookahead
//   (a)        grouping              ()         matches nothing
//   'c' "str"  literals              [a-z_] [^0-9]  character classes
//   label:a    AST label
//
// Escapes: \n \r \t \\ \' \" \[ \] \^ \- \uXXXX

#ifndef PIKA_META_GRAMMAR_HPP
#define PIKA_META_GRAMMAR_HPP

#include <pika/expr.hpp>
#include <pika/grammar.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace pika {

// Parses grammar text (UTF-8). Precedence groups are returned unexpanded.
// Throws GrammarError with a character offset into the decoded text.
std::vector<Rule> parse_grammar_source(std::string_view text);

// Expands each precedence group R[p0] < ... < R[pk] into rules named "R[p]"
// that fail over to the next level, plus an alias R for the lowest level.
// Rules without a precedence pass through unchanged.
std::vector<Rule> rewrite_precedence_hierarchy(std::vector<Rule> rules);

// Parse, expand precedence and build. Errors are rethrown with an
// "origin:line:col: " prefix.
Grammar compile_grammar(std::string_view text, const BuildOptions& options = {},
                        std::string_view origin = "<grammar>");

// 1-based line and column of a character offset in UTF-8 text.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

} // namespace pika

#endif // PIKA_META_GRAMMAR_HPP
