// packrat.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)
//
// Top-down memoized PEG matcher over the same preprocessed grammar. Used as a
// reference for the bottom-up engine; rejects left-recursive grammars.

#ifndef PIKA_PACKRAT_HPP
#define PIKA_PACKRAT_HPP

#include <pika/memo_table.hpp>

#include <absl/container/flat_hash_map.h>

#include <memory>
#include <memory_resource>
#include <string>
#include <string_view>

namespace pika {

class PackratParser {
public:
    // Throws GrammarError naming a cycle head if the grammar is left-recursive.
    PackratParser(const Grammar& grammar, std::u32string input);
    PackratParser(PackratParser&&) noexcept;
    PackratParser& operator=(PackratParser&&) noexcept;
    ~PackratParser();

    const Grammar& grammar() const { return *grammar_; }
    std::u32string_view input() const { return input_; }

    // Memoized; nullptr on mismatch.
    const Match* match(const Clause& clause, Pos pos);
    const Match* match_rule(std::string_view rule, Pos pos);

    // Memo entries, including memoized failures.
    std::size_t entry_count() const { return memo_.size(); }

private:
    const Match* compute(const Clause& clause, Pos pos);
    const Match* make(const Clause& clause, Pos pos, Pos len, std::uint32_t first_idx,
                      std::span<const Match* const> children);

    const Grammar* grammar_;
    std::u32string input_;
    absl::flat_hash_map<std::uint64_t, const Match*> memo_;
    std::unique_ptr<std::pmr::monotonic_buffer_resource> arena_;
};

// Matches the start rule at position 0.
PackratParser packrat_parse(const Grammar& grammar, std::u32string input);

} // namespace pika

#endif // PIKA_PACKRAT_HPP
