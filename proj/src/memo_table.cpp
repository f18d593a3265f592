// memo_table.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/memo_table.hpp>

#include <absl/container/inlined_vector.h>

#include <algorithm>

namespace pika {

MemoTable::MemoTable(const Grammar& grammar, std::u32string input)
    : grammar_(&grammar),
      input_(std::move(input)),
      by_clause_(grammar.clauses().size()),
      starts_(grammar.clauses().size()),
      arena_(std::make_unique<std::pmr::monotonic_buffer_resource>()),
      mutex_(std::make_unique<std::recursive_mutex>())
{}

MemoTable::MemoTable(MemoTable&&) noexcept = default;
MemoTable& MemoTable::operator=(MemoTable&&) noexcept = default;
MemoTable::~MemoTable() = default;

const Match* MemoTable::stored(const Clause& clause, Pos pos) const
{
    auto it = entries_.find(key(clause, pos));
    return it == entries_.end() ? nullptr : it->second;
}

const Match* MemoTable::look_up_best_match(const Clause& clause, Pos pos) const
{
    if (const Match* m = stored(clause, pos))
        return m;
    // A nullable clause is evaluated rather than assumed to match empty,
    // since a lookahead inside it may fail.
    if (clause.kind == ClauseKind::NotFollowedBy || clause.can_match_zero_chars)
        return evaluate(clause, pos);
    return nullptr;
}

const Match* MemoTable::evaluate(const Clause& clause, Pos pos) const
{
    std::unique_lock<std::recursive_mutex> lock(*mutex_, std::defer_lock);
    if (!parsing_)
        lock.lock();
    std::uint64_t k = key(clause, pos);
    if (std::find(in_progress_.begin(), in_progress_.end(), k) != in_progress_.end()) {
        ++stats_.top_down_cycle_breaks;
        if (clause.can_match_zero_chars && clause.kind != ClauseKind::NotFollowedBy)
            return new_match(clause, pos, 0, 0, {});
        return nullptr;
    }
    ++stats_.top_down_evaluations;
    in_progress_.push_back(k);
    const Match* m = match_clause(clause, pos);
    in_progress_.pop_back();
    return m;
}

std::span<const Match* const> MemoTable::matches_of(const Clause& clause) const
{
    return by_clause_.at(static_cast<std::size_t>(clause.index));
}

const Match* MemoTable::next_match_at_or_after(const Clause& clause, Pos pos, std::size_t* probes) const
{
    const auto& v = by_clause_.at(static_cast<std::size_t>(clause.index));
    const auto& starts = starts_[static_cast<std::size_t>(clause.index)];
    // Descending order: find the first entry starting before pos; the one
    // preceding it is the answer.
    std::size_t lo = 0;
    std::size_t hi = starts.size();
    std::size_t count = 0;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        ++count;
        if (starts[mid] >= pos)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (probes)
        *probes += count;
    return lo == 0 ? nullptr : v[lo - 1];
}

const Match* MemoTable::new_match(const Clause& clause, Pos pos, Pos len, std::uint32_t first_idx,
                                  std::span<const Match* const> children) const
{
    std::pmr::polymorphic_allocator<std::byte> alloc(arena_.get());
    auto* m = alloc.new_object<Match>();
    m->clause = &clause;
    m->start = pos;
    m->len = len;
    m->first_idx = first_idx;
    if (!children.empty()) {
        auto* arr = alloc.allocate_object<const Match*>(children.size());
        std::copy(children.begin(), children.end(), arr);
        m->children = {arr, children.size()};
    }
    ++stats_.matches_allocated;
    return m;
}

const Match* MemoTable::match_clause(const Clause& clause, Pos pos) const
{
    switch (clause.kind) {
    case ClauseKind::Char:
    case ClauseKind::CharSet:
    case ClauseKind::String:
    case ClauseKind::Nothing: {
        auto len = clause.match_terminal(input_, pos);
        return len ? new_match(clause, pos, static_cast<Pos>(*len), 0, {}) : nullptr;
    }
    case ClauseKind::Seq: {
        absl::InlinedVector<const Match*, 8> subs;
        Pos cur = pos;
        for (const Clause* sub : clause.sub_clauses) {
            const Match* m = look_up_best_match(*sub, cur);
            if (!m)
                return nullptr;
            subs.push_back(m);
            cur += m->len;
        }
        return new_match(clause, pos, cur - pos, 0, subs);
    }
    case ClauseKind::First:
        for (std::size_t i = 0; i < clause.sub_clauses.size(); ++i) {
            if (const Match* m = look_up_best_match(*clause.sub_clauses[i], pos)) {
                const Match* one[] = {m};
                return new_match(clause, pos, m->len, static_cast<std::uint32_t>(i), one);
            }
        }
        return nullptr;
    case ClauseKind::OneOrMore: {
        // Only reached when the right-recursive rewrite is disabled.
        absl::InlinedVector<const Match*, 8> subs;
        Pos cur = pos;
        while (const Match* m = look_up_best_match(*clause.sub_clauses[0], cur)) {
            subs.push_back(m);
            cur += m->len;
            if (m->len == 0)
                break;
        }
        return subs.empty() ? nullptr : new_match(clause, pos, cur - pos, 0, subs);
    }
    case ClauseKind::NotFollowedBy:
        if (look_up_best_match(*clause.sub_clauses[0], pos))
            return nullptr;
        return new_match(clause, pos, 0, 0, {});
    }
    return nullptr;
}

void MemoTable::add_match(const Clause& clause, Pos pos, const Match* match, Queue& queue,
                          const ParseOptions& options)
{
    bool updated = false;
    if (match) {
        auto [it, inserted] = entries_.try_emplace(key(clause, pos), match);
        if (inserted || match->is_better_than(*it->second)) {
            it->second = match;
            updated = true;
            ++stats_.memo_updates;
            auto& index = by_clause_[static_cast<std::size_t>(clause.index)];
            if (pos != column_ || (!index.empty() && index.back()->start < pos))
                ++stats_.watermark_violations;
            if (!index.empty() && index.back()->start == pos) {
                index.back() = match;
            } else {
                index.push_back(match);
                starts_[static_cast<std::size_t>(clause.index)].push_back(pos);
            }
        }
    }
    for (const Clause* parent : clause.seed_parents) {
        if (updated || parent->can_match_zero_chars) {
            queue.push(parent->index);
            if (options.observer)
                options.observer(QueueEvent::Enqueue, *parent, pos);
        }
    }
}

MemoTable parse(const Grammar& grammar, std::u32string input, const ParseOptions& options)
{
    MemoTable table(grammar, std::move(input));
    table.parsing_ = true;
    const auto& clauses = grammar.clauses();
    const auto& terminals = grammar.seed_terminals();
    MemoTable::Queue queue;
    for (std::size_t p = table.input_.size(); p-- > 0;) {
        Pos pos = static_cast<Pos>(p);
        table.column_ = pos;
        for (const Clause* t : terminals) {
            queue.push(t->index);
            if (options.observer)
                options.observer(QueueEvent::Enqueue, *t, pos);
        }
        while (!queue.empty()) {
            const Clause& clause = *clauses[static_cast<std::size_t>(queue.top())];
            queue.pop();
            ++table.stats_.queue_pops;
            if (options.observer)
                options.observer(QueueEvent::Dequeue, clause, pos);
            const Match* m = table.match_clause(clause, pos);
            table.add_match(clause, pos, m, queue, options);
        }
    }
    table.parsing_ = false;
    return table;
}

} // namespace pika
