// memo_table.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_MEMO_TABLE_HPP
#define PIKA_MEMO_TABLE_HPP

#include <pika/grammar.hpp>

#include <absl/container/flat_hash_map.h>

#include <cstdint>
#include <functional>
#include <memory>
#include <memory_resource>
#include <mutex>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pika {

using Pos = std::uint32_t;

// One memoized match: a parse tree node. Immutable once created; a better
// match replaces the table entry but stays reachable from its successors.
struct Match {
    const Clause* clause = nullptr;
    Pos start = 0;
    Pos len = 0;
    // Index of the matching alternative (First only, else 0).
    std::uint32_t first_idx = 0;
    std::span<const Match* const> children;

    Pos end() const { return start + len; }

    // An earlier First alternative wins regardless of length; otherwise longer wins.
    bool is_better_than(const Match& other) const
    {
        return (clause->kind == ClauseKind::First && first_idx < other.first_idx) || len > other.len;
    }
};

struct ParseStats {
    std::size_t queue_pops = 0;
    std::size_t memo_updates = 0;
    std::size_t matches_allocated = 0;
    std::size_t top_down_evaluations = 0;
    // Re-entrant top-down evaluations cut short (see MemoTable::evaluate).
    std::size_t top_down_cycle_breaks = 0;
    // Writes to a column the main loop had already left. Always 0.
    std::size_t watermark_violations = 0;
};

enum class QueueEvent { Enqueue, Dequeue };

struct ParseOptions {
    // Called on every priority queue push and pop, for instrumentation.
    std::function<void(QueueEvent, const Clause&, Pos)> observer;
};

class MemoTable {
public:
    MemoTable(const Grammar& grammar, std::u32string input);
    MemoTable(MemoTable&&) noexcept;
    MemoTable& operator=(MemoTable&&) noexcept;
    ~MemoTable();

    const Grammar& grammar() const { return *grammar_; }
    std::u32string_view input() const { return input_; }

    // The stored entry, without any on-demand evaluation.
    const Match* stored(const Clause& clause, Pos pos) const;

    // Stored entry; else NotFollowedBy and nullable clauses are evaluated
    // top-down; else nullptr.
    const Match* look_up_best_match(const Clause& clause, Pos pos) const;

    // Top-down evaluation of `clause` at `pos` over the current table.
    // A re-entrant evaluation of the same (clause, pos) yields a zero-length
    // match for nullable clauses and fails otherwise.
    const Match* evaluate(const Clause& clause, Pos pos) const;

    // Stored matches of `clause`, by descending start position.
    std::span<const Match* const> matches_of(const Clause& clause) const;
    // Stored match of `clause` with the smallest start >= pos. O(log n);
    // the number of comparisons is added to `probes` if given.
    const Match* next_match_at_or_after(const Clause& clause, Pos pos, std::size_t* probes = nullptr) const;

    std::size_t entry_count() const { return entries_.size(); }
    const ParseStats& stats() const { return stats_; }

private:
    friend MemoTable parse(const Grammar& grammar, std::u32string input, const ParseOptions& options);

    using Queue = std::priority_queue<int, std::vector<int>, std::greater<int>>;

    static std::uint64_t key(const Clause& clause, Pos pos)
    {
        return (static_cast<std::uint64_t>(clause.index) << 32) | pos;
    }

    const Match* match_clause(const Clause& clause, Pos pos) const;
    void add_match(const Clause& clause, Pos pos, const Match* match, Queue& queue,
                   const ParseOptions& options);
    const Match* new_match(const Clause& clause, Pos pos, Pos len, std::uint32_t first_idx,
                           std::span<const Match* const> children) const;

    const Grammar* grammar_;
    std::u32string input_;
    absl::flat_hash_map<std::uint64_t, const Match*> entries_;
    std::vector<std::vector<const Match*>> by_clause_;
    // Start of each by_clause_ entry, kept apart so searches stay in cache.
    std::vector<std::vector<Pos>> starts_;
    std::unique_ptr<std::pmr::monotonic_buffer_resource> arena_;
    std::unique_ptr<std::recursive_mutex> mutex_;
    mutable std::vector<std::uint64_t> in_progress_;
    mutable ParseStats stats_;
    bool parsing_ = false;
    Pos column_ = 0;
};

// Fills the memo table bottom-up within each column, right to left across columns.
MemoTable parse(const Grammar& grammar, std::u32string input, const ParseOptions& options = {});

} // namespace pika

#endif // PIKA_MEMO_TABLE_HPP
