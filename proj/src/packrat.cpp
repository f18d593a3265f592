// packrat.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/packrat.hpp>

#include <absl/container/inlined_vector.h>

#include <algorithm>
#include <stdexcept>

namespace pika {

namespace {

// Marks a memo slot whose computation is under way.
const Match in_progress_marker{};
const Match* const in_progress = &in_progress_marker;

} // namespace

PackratParser::PackratParser(const Grammar& grammar, std::u32string input)
    : grammar_(&grammar),
      input_(std::move(input)),
      arena_(std::make_unique<std::pmr::monotonic_buffer_resource>())
{
    if (auto head = find_left_recursion(grammar))
        throw GrammarError("grammar is left-recursive through " + *head);
}

PackratParser::PackratParser(PackratParser&&) noexcept = default;
PackratParser& PackratParser::operator=(PackratParser&&) noexcept = default;
PackratParser::~PackratParser() = default;

const Match* PackratParser::match_rule(std::string_view rule, Pos pos)
{
    return match(*grammar_->rule(rule).clause, pos);
}

const Match* PackratParser::match(const Clause& clause, Pos pos)
{
    std::uint64_t k = (static_cast<std::uint64_t>(clause.index) << 32) | pos;
    auto [it, inserted] = memo_.try_emplace(k, in_progress);
    if (!inserted) {
        if (it->second == in_progress)
            throw std::logic_error("packrat: re-entered " + clause.name);
        return it->second;
    }
    const Match* m = compute(clause, pos);
    memo_[k] = m;
    return m;
}

const Match* PackratParser::make(const Clause& clause, Pos pos, Pos len, std::uint32_t first_idx,
                                 std::span<const Match* const> children)
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
    return m;
}

const Match* PackratParser::compute(const Clause& clause, Pos pos)
{
    switch (clause.kind) {
    case ClauseKind::Char:
    case ClauseKind::CharSet:
    case ClauseKind::String:
    case ClauseKind::Nothing: {
        auto len = clause.match_terminal(input_, pos);
        return len ? make(clause, pos, static_cast<Pos>(*len), 0, {}) : nullptr;
    }
    case ClauseKind::Seq: {
        absl::InlinedVector<const Match*, 8> subs;
        Pos cur = pos;
        for (const Clause* sub : clause.sub_clauses) {
            const Match* m = match(*sub, cur);
            if (!m)
                return nullptr;
            subs.push_back(m);
            cur += m->len;
        }
        return make(clause, pos, cur - pos, 0, subs);
    }
    case ClauseKind::First:
        for (std::size_t i = 0; i < clause.sub_clauses.size(); ++i) {
            if (const Match* m = match(*clause.sub_clauses[i], pos)) {
                const Match* one[] = {m};
                return make(clause, pos, m->len, static_cast<std::uint32_t>(i), one);
            }
        }
        return nullptr;
    case ClauseKind::OneOrMore: {
        absl::InlinedVector<const Match*, 8> subs;
        Pos cur = pos;
        while (const Match* m = match(*clause.sub_clauses[0], cur)) {
            subs.push_back(m);
            cur += m->len;
            if (m->len == 0)
                break;
        }
        return subs.empty() ? nullptr : make(clause, pos, cur - pos, 0, subs);
    }
    case ClauseKind::NotFollowedBy:
        return match(*clause.sub_clauses[0], pos) ? nullptr : make(clause, pos, 0, 0, {});
    }
    return nullptr;
}

PackratParser packrat_parse(const Grammar& grammar, std::u32string input)
{
    PackratParser p(grammar, std::move(input));
    p.match_rule(grammar.start_rule(), 0);
    return p;
}

} // namespace pika
