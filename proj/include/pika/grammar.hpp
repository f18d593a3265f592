// grammar.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_GRAMMAR_HPP
#define PIKA_GRAMMAR_HPP

#include <pika/expr.hpp>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pika {

enum class ClauseKind {
    Seq,
    First,
    OneOrMore,
    NotFollowedBy,
    Char,
    CharSet,
    String,
    Nothing,
};

const char* to_string(ClauseKind kind);

// One node of the interned grammar graph. Every clause is one row of the
// memo table. A Grammar hands out only const access; fields are written
// during preprocessing.
struct Clause {
    ClauseKind kind = ClauseKind::Nothing;
    std::vector<const Clause*> sub_clauses;
    // AST label on the edge to each subclause ("" for none).
    std::vector<std::string> sub_clause_labels;

    char32_t ch = 0;
    CharSet charset;
    std::u32string text;

    // Position in bottom-up topological order.
    int index = -1;
    bool can_match_zero_chars = false;
    // Parents that can match at the same start position as this clause.
    std::vector<const Clause*> seed_parents;

    // Right-recursive Seq(Y, First(X, Nothing)) produced from a OneOrMore.
    bool one_or_more_chain = false;

    // Rules whose toplevel clause this is, declaration order.
    std::vector<std::string> rule_names;
    // Name used in parse trees: preferred rule name, else the clause text.
    std::string name;

    bool is_terminal() const;
    // Length matched by a terminal at `pos`, or nullopt.
    std::optional<std::size_t> match_terminal(std::u32string_view input, std::size_t pos) const;
};

// Error in a grammar: malformed source, bad reference, or invalid structure.
class GrammarError : public std::runtime_error {
public:
    GrammarError(const std::string& message, std::size_t position = no_position)
        : std::runtime_error(message), position_(position)
    {}

    // Character offset in the grammar source, or no_position.
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

struct GrammarRule {
    std::string name;
    const Clause* clause = nullptr;
    std::string ast_label;
    std::optional<int> precedence;
    std::optional<Associativity> associativity;
    bool synthetic = false;
    bool alias = false;
};

struct BuildOptions {
    // Rewrite OneOrMore into right-recursive helper rules.
    bool rewrite_one_or_more = true;
    // Empty selects a default (see Grammar::start_rule).
    std::string start_rule;
};

class Grammar {
public:
    Grammar(Grammar&&) noexcept = default;
    Grammar& operator=(Grammar&&) noexcept = default;
    Grammar(const Grammar&) = delete;
    Grammar& operator=(const Grammar&) = delete;
    ~Grammar();

    // All clauses in bottom-up topological order; clauses()[i]->index == i.
    const std::vector<const Clause*>& clauses() const { return clauses_; }
    const std::vector<GrammarRule>& rules() const { return rules_; }
    // Terminals seeded in every column (excludes Nothing).
    const std::vector<const Clause*>& seed_terminals() const { return terminals_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    const GrammarRule* find_rule(std::string_view name) const;
    // Throws GrammarError on unknown names.
    const GrammarRule& rule(std::string_view name) const;

    // Explicit start rule if one was given; otherwise the first rule no
    // other rule refers to, else the lowest level of the first precedence
    // hierarchy, else the rule whose clause sorts highest.
    const std::string& start_rule() const { return start_rule_; }

    bool one_or_more_rewritten() const { return rewrite_one_or_more_; }

private:
    Grammar() = default;
    friend Grammar build_grammar(std::vector<Rule> rules, const BuildOptions& options);

    std::vector<std::unique_ptr<Clause>> owned_;
    std::vector<const Clause*> clauses_;
    std::vector<GrammarRule> rules_;
    std::vector<const Clause*> terminals_;
    std::vector<std::string> warnings_;
    std::string start_rule_;
    bool rewrite_one_or_more_ = true;
};

// Replaces Optional, ZeroOrMore and FollowedBy with core operators:
// e? -> (e / ()), e* -> (e+ / ()), &e -> !!e.
Expr desugar(const Expr& e);

// Rewrites each OneOrMore into right-recursive form. A rule X <- Y+ becomes
// X <- Y X?; X <- Y* (desugared) becomes X <- (Y X?)?; nested Y+ becomes a
// reference to a synthetic rule named after the repetition. Input must be
// desugared. Returns the rewritten rule followed by any synthetic rules.
std::vector<Rule> rewrite_one_or_more(Rule rule);

// Bottom-up topological order of every clause reachable from the roots, by
// postorder DFS from: clauses no other clause refers to, then the given
// lowest-precedence clauses, then the heads of remaining cycles. Within a
// strongly connected component, edges to subclauses matched after the
// parent's start position are not followed, so a cycle is only broken
// where it is left-recursive. can_match_zero_chars must already be set.
std::vector<const Clause*> topo_sort_clauses(std::span<const Clause* const> rule_clauses,
                                             std::span<const Clause* const> lowest_precedence_clauses);

// `clauses` must be sorted bottom-up. Iterates to a fixed point so clauses on
// cycles settle correctly.
void compute_can_match_zero_chars(std::span<Clause* const> clauses);

// `clauses` indexed by Clause::index; can_match_zero_chars must be set.
void compute_seed_parents(std::span<Clause* const> clauses);

// Interns, resolves references, desugars, rewrites repetition, sorts and
// analyses the rule set. Throws GrammarError.
Grammar build_grammar(std::vector<Rule> rules, const BuildOptions& options = {});

// Clauses that can recurse into themselves without consuming input.
// Returns the name of a cycle head if the grammar is left-recursive.
std::optional<std::string> find_left_recursion(const Grammar& grammar);

// True if `child` (sub_clauses[i] of `parent`) is matched at the parent's
// own start position.
bool is_same_position_child(const Clause& parent, std::size_t i);

// Clause text in grammar notation, with rule clauses shown by name.
std::string to_string(const Clause& clause);

} // namespace pika

#endif // PIKA_GRAMMAR_HPP
