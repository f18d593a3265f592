// recovery.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/recovery.hpp>

#include <algorithm>
#include <utility>

namespace pika {

std::vector<ErrorSpan> find_error_spans(const MemoTable& table, std::span<const std::string> rules)
{
    const Grammar& g = table.grammar();
    std::vector<const Clause*> clauses;
    for (const std::string& name : rules) {
        const Clause* c = g.rule(name).clause;
        if (std::find(clauses.begin(), clauses.end(), c) == clauses.end())
            clauses.push_back(c);
    }

    std::vector<std::pair<Pos, Pos>> covered;
    for (const Clause* c : clauses) {
        for (const Match* m : table.matches_of(*c)) {
            if (m->len > 0)
                covered.emplace_back(m->start, m->end());
        }
    }
    std::sort(covered.begin(), covered.end());

    std::vector<ErrorSpan> spans;
    Pos n = static_cast<Pos>(table.input().size());
    Pos pos = 0;
    auto gap = [&](Pos start, Pos end) {
        ErrorSpan s{start, end, nullptr};
        for (const Clause* c : clauses) {
            const Match* m = table.next_match_at_or_after(*c, end);
            if (m && m->start == end && (!s.following_match || m->len > s.following_match->len))
                s.following_match = m;
        }
        spans.push_back(s);
    };
    for (auto [start, end] : covered) {
        if (start > pos)
            gap(pos, start);
        pos = std::max(pos, end);
    }
    if (pos < n)
        gap(pos, n);
    return spans;
}

const Match* next_match_after(const MemoTable& table, std::string_view rule, Pos pos, std::size_t* probes)
{
    return table.next_match_at_or_after(*table.grammar().rule(rule).clause, pos, probes);
}

} // namespace pika
