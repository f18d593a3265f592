// recovery.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_RECOVERY_HPP
#define PIKA_RECOVERY_HPP

#include <pika/memo_table.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pika {

// Input not covered by any match of the rules of interest: [start, end).
struct ErrorSpan {
    Pos start = 0;
    Pos end = 0;
    // Match of a rule of interest starting at `end`, if one exists.
    const Match* following_match = nullptr;
};

// Maximal gaps in [0, n) not covered by a stored non-empty match of any of
// the named rules, ascending. Throws GrammarError for unknown rules.
std::vector<ErrorSpan> find_error_spans(const MemoTable& table, std::span<const std::string> rules);

// Stored match of the rule with the smallest start >= pos. Comparisons made
// by the search are added to `probes` if given.
const Match* next_match_after(const MemoTable& table, std::string_view rule, Pos pos,
                              std::size_t* probes = nullptr);

} // namespace pika

#endif // PIKA_RECOVERY_HPP
