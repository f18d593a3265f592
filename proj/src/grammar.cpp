// grammar.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/grammar.hpp>
#include <pika/unicode.hpp>

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace pika {

const char* to_string(ClauseKind kind)
{
    switch (kind) {
    case ClauseKind::Seq: return "Seq";
    case ClauseKind::First: return "First";
    case ClauseKind::OneOrMore: return "OneOrMore";
    case ClauseKind::NotFollowedBy: return "NotFollowedBy";
    case ClauseKind::Char: return "Char";
    case ClauseKind::CharSet: return "CharSet";
    case ClauseKind::String: return "String";
    case ClauseKind::Nothing: return "Nothing";
    }
    return "?";
}

bool Clause::is_terminal() const
{
    return kind == ClauseKind::Char || kind == ClauseKind::CharSet || kind == ClauseKind::String
        || kind == ClauseKind::Nothing;
}

std::optional<std::size_t> Clause::match_terminal(std::u32string_view input, std::size_t pos) const
{
    switch (kind) {
    case ClauseKind::Char:
        if (pos < input.size() && input[pos] == ch)
            return 1;
        return std::nullopt;
    case ClauseKind::CharSet:
        if (pos < input.size() && charset.contains(input[pos]))
            return 1;
        return std::nullopt;
    case ClauseKind::String:
        if (pos <= input.size() && input.substr(pos, text.size()) == text)
            return text.size();
        return std::nullopt;
    case ClauseKind::Nothing:
        return 0;
    default:
        return std::nullopt;
    }
}

Grammar::~Grammar() = default;

const GrammarRule* Grammar::find_rule(std::string_view name) const
{
    for (const auto& r : rules_) {
        if (r.name == name)
            return &r;
    }
    return nullptr;
}

const GrammarRule& Grammar::rule(std::string_view name) const
{
    if (const GrammarRule* r = find_rule(name))
        return *r;
    throw GrammarError("unknown rule '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Desugaring and repetition rewrite

namespace {

// Copy of `e` without children.
Expr shell(const Expr& e)
{
    Expr out{e.kind};
    out.label = e.label;
    out.ch = e.ch;
    out.charset = e.charset;
    out.text = e.text;
    out.ref_name = e.ref_name;
    out.source_pos = e.source_pos;
    return out;
}

Expr at(Expr e, std::size_t pos)
{
    e.source_pos = pos;
    return e;
}

} // namespace

Expr desugar(const Expr& e)
{
    std::vector<Expr> children;
    children.reserve(e.children.size());
    for (const Expr& c : e.children)
        children.push_back(desugar(c));

    Expr out = shell(e);
    switch (e.kind) {
    case ExprKind::Optional:
        out.kind = ExprKind::First;
        out.children = {std::move(children[0]), at(expr::nothing(), e.source_pos)};
        break;
    case ExprKind::ZeroOrMore:
        out.kind = ExprKind::First;
        out.children = {at(expr::one_or_more(std::move(children[0])), e.source_pos),
                        at(expr::nothing(), e.source_pos)};
        break;
    case ExprKind::FollowedBy:
        out.kind = ExprKind::NotFollowedBy;
        out.children = {at(expr::not_followed_by(std::move(children[0])), e.source_pos)};
        break;
    default:
        out.children = std::move(children);
        break;
    }
    return out;
}

namespace {

// Y X?
Expr make_chain(Expr y, const std::string& self, std::size_t pos)
{
    Expr tail = at(expr::first({at(expr::ref(self), pos), at(expr::nothing(), pos)}), pos);
    return at(expr::seq({std::move(y), std::move(tail)}), pos);
}

class RepetitionRewriter {
public:
    explicit RepetitionRewriter(std::vector<Rule>& helpers) : helpers_(helpers) {}

    // Replaces every OneOrMore in `e` with a reference to a helper rule.
    Expr nested(const Expr& e)
    {
        if (e.kind != ExprKind::OneOrMore) {
            Expr out = shell(e);
            for (const Expr& c : e.children)
                out.children.push_back(nested(c));
            return out;
        }
        Expr unlabeled = e;
        unlabeled.label.clear();
        std::string name = to_string(unlabeled);
        Expr y = nested(e.children[0]);
        if (seen_.insert(name).second) {
            Rule helper;
            helper.name = name;
            helper.clause = make_chain(std::move(y), name, e.source_pos);
            helper.synthetic = true;
            helper.one_or_more_chain = true;
            helper.source_pos = e.source_pos;
            helpers_.push_back(std::move(helper));
        }
        Expr r = at(expr::ref(name), e.source_pos);
        r.label = e.label;
        return r;
    }

private:
    std::vector<Rule>& helpers_;
    std::unordered_set<std::string> seen_;
};

} // namespace

std::vector<Rule> rewrite_one_or_more(Rule rule)
{
    std::vector<Rule> helpers;
    RepetitionRewriter rw(helpers);
    Expr& root = rule.clause;

    if (root.kind == ExprKind::OneOrMore) {
        Expr chain = make_chain(rw.nested(root.children[0]), rule.name, root.source_pos);
        chain.label = root.label;
        root = std::move(chain);
        rule.one_or_more_chain = true;
    } else if (root.kind == ExprKind::First && root.children.size() == 2
               && root.children[0].kind == ExprKind::OneOrMore && root.children[0].label.empty()
               && root.children[1].kind == ExprKind::Nothing) {
        Expr& rep = root.children[0];
        rep = make_chain(rw.nested(rep.children[0]), rule.name, rep.source_pos);
        rule.one_or_more_chain = true;
    } else {
        root = rw.nested(root);
    }

    std::vector<Rule> out;
    out.push_back(std::move(rule));
    for (Rule& h : helpers)
        out.push_back(std::move(h));
    return out;
}

// ---------------------------------------------------------------------------
// Topological sort

namespace {

using ClauseSet = std::unordered_set<const Clause*>;

// Subclause edges used for ordering. Inside a strongly connected component
// only edges to a subclause matched at the parent's own start position are
// kept: a cycle through a later position cannot make a clause depend on
// itself within one column, so it need not constrain the order.
class EdgeFilter {
public:
    explicit EdgeFilter(const std::vector<const Clause*>& clauses)
    {
        for (const Clause* c : clauses) {
            if (!index_.count(c))
                strongconnect(c);
        }
    }

    bool keep(const Clause& parent, std::size_t i) const
    {
        return component_.at(&parent) != component_.at(parent.sub_clauses[i]) || is_same_position_child(parent, i);
    }

private:
    // Tarjan's algorithm.
    void strongconnect(const Clause* c)
    {
        index_[c] = low_[c] = next_++;
        stack_.push_back(c);
        on_stack_.insert(c);
        for (const Clause* sub : c->sub_clauses) {
            if (!index_.count(sub)) {
                strongconnect(sub);
                low_[c] = std::min(low_[c], low_[sub]);
            } else if (on_stack_.count(sub)) {
                low_[c] = std::min(low_[c], index_[sub]);
            }
        }
        if (low_[c] == index_[c]) {
            const Clause* member = nullptr;
            do {
                member = stack_.back();
                stack_.pop_back();
                on_stack_.erase(member);
                component_[member] = components_;
            } while (member != c);
            ++components_;
        }
    }

    std::unordered_map<const Clause*, int> index_;
    std::unordered_map<const Clause*, int> low_;
    std::unordered_map<const Clause*, int> component_;
    std::vector<const Clause*> stack_;
    ClauseSet on_stack_;
    int next_ = 0;
    int components_ = 0;
};

void find_reachable(const Clause* clause, ClauseSet& visited, std::vector<const Clause*>& out)
{
    if (!visited.insert(clause).second)
        return;
    for (const Clause* sub : clause->sub_clauses)
        find_reachable(sub, visited, out);
    out.push_back(clause);
}

void postorder(const Clause* clause, const EdgeFilter& edges, ClauseSet& visited, std::vector<const Clause*>& out)
{
    if (!visited.insert(clause).second)
        return;
    for (std::size_t i = 0; i < clause->sub_clauses.size(); ++i) {
        if (edges.keep(*clause, i))
            postorder(clause->sub_clauses[i], edges, visited, out);
    }
    out.push_back(clause);
}

void find_cycle_heads(const Clause* clause, const EdgeFilter& edges, ClauseSet& discovered, ClauseSet& finished,
                      std::vector<const Clause*>& heads)
{
    discovered.insert(clause);
    for (std::size_t i = 0; i < clause->sub_clauses.size(); ++i) {
        if (!edges.keep(*clause, i))
            continue;
        const Clause* sub = clause->sub_clauses[i];
        if (discovered.count(sub)) {
            if (std::find(heads.begin(), heads.end(), sub) == heads.end())
                heads.push_back(sub);
        } else if (!finished.count(sub)) {
            find_cycle_heads(sub, edges, discovered, finished, heads);
        }
    }
    discovered.erase(clause);
    finished.insert(clause);
}

} // namespace

std::vector<const Clause*> topo_sort_clauses(std::span<const Clause* const> rule_clauses,
                                             std::span<const Clause* const> lowest_precedence_clauses)
{
    std::vector<const Clause*> unordered;
    ClauseSet visited;
    for (const Clause* c : rule_clauses)
        find_reachable(c, visited, unordered);
    EdgeFilter edges(unordered);

    ClauseSet referenced;
    for (const Clause* c : unordered) {
        for (std::size_t i = 0; i < c->sub_clauses.size(); ++i) {
            if (edges.keep(*c, i))
                referenced.insert(c->sub_clauses[i]);
        }
    }

    std::vector<const Clause*> top_level;
    for (const Clause* c : rule_clauses) {
        if (!referenced.count(c) && std::find(top_level.begin(), top_level.end(), c) == top_level.end())
            top_level.push_back(c);
    }

    // Subclauses reached only through dropped edges go first, so they sort
    // below the rules that contain them.
    std::vector<const Clause*> roots;
    for (const Clause* c : unordered) {
        if (!referenced.count(c) && std::find(top_level.begin(), top_level.end(), c) == top_level.end()
            && std::find(rule_clauses.begin(), rule_clauses.end(), c) == rule_clauses.end())
            roots.push_back(c);
    }
    roots.insert(roots.end(), top_level.begin(), top_level.end());
    roots.insert(roots.end(), lowest_precedence_clauses.begin(), lowest_precedence_clauses.end());

    ClauseSet discovered;
    ClauseSet finished;
    std::vector<const Clause*> heads;
    for (const Clause* c : top_level)
        find_cycle_heads(c, edges, discovered, finished, heads);
    for (const Clause* c : rule_clauses)
        find_cycle_heads(c, edges, discovered, finished, heads);
    roots.insert(roots.end(), heads.begin(), heads.end());
    // Rules reachable only through a dropped edge.
    roots.insert(roots.end(), unordered.begin(), unordered.end());

    std::vector<const Clause*> order;
    ClauseSet reached;
    for (const Clause* c : roots)
        postorder(c, edges, reached, order);

    // Terminals have no subclauses, so moving them first keeps every
    // non-cycle edge pointing downwards.
    std::stable_partition(order.begin(), order.end(),
                          [](const Clause* c) { return c->is_terminal(); });
    return order;
}

// ---------------------------------------------------------------------------
// Clause analysis

namespace {

bool zero_chars_step(const Clause& c)
{
    switch (c.kind) {
    case ClauseKind::Nothing:
    case ClauseKind::NotFollowedBy:
        return true;
    case ClauseKind::Char:
    case ClauseKind::CharSet:
    case ClauseKind::String:
        return false;
    case ClauseKind::Seq:
        return std::all_of(c.sub_clauses.begin(), c.sub_clauses.end(),
                           [](const Clause* s) { return s->can_match_zero_chars; });
    case ClauseKind::First:
        return std::any_of(c.sub_clauses.begin(), c.sub_clauses.end(),
                           [](const Clause* s) { return s->can_match_zero_chars; });
    case ClauseKind::OneOrMore:
        return c.sub_clauses[0]->can_match_zero_chars;
    }
    return false;
}

void add_seed_parent(const Clause* child, const Clause* parent)
{
    // Only the owner holds non-const pointers; children are owned by the same grammar.
    auto& parents = const_cast<Clause*>(child)->seed_parents;
    if (std::find(parents.begin(), parents.end(), parent) == parents.end())
        parents.push_back(parent);
}

} // namespace

void compute_can_match_zero_chars(std::span<Clause* const> clauses)
{
    for (Clause* c : clauses)
        c->can_match_zero_chars = false;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Clause* c : clauses) {
            bool v = zero_chars_step(*c);
            if (v != c->can_match_zero_chars) {
                c->can_match_zero_chars = v;
                changed = true;
            }
        }
    }
}

void compute_seed_parents(std::span<Clause* const> clauses)
{
    for (Clause* c : clauses)
        c->seed_parents.clear();
    for (Clause* parent : clauses) {
        switch (parent->kind) {
        case ClauseKind::Seq:
            for (const Clause* sub : parent->sub_clauses) {
                add_seed_parent(sub, parent);
                if (!sub->can_match_zero_chars)
                    break;
            }
            break;
        case ClauseKind::First:
        case ClauseKind::OneOrMore:
            for (const Clause* sub : parent->sub_clauses)
                add_seed_parent(sub, parent);
            break;
        default:
            break;
        }
    }
}

bool is_same_position_child(const Clause& parent, std::size_t i)
{
    switch (parent.kind) {
    case ClauseKind::First:
    case ClauseKind::NotFollowedBy:
        return true;
    case ClauseKind::OneOrMore:
        return i == 0;
    case ClauseKind::Seq:
        for (std::size_t k = 0; k < i; ++k) {
            if (!parent.sub_clauses[k]->can_match_zero_chars)
                return false;
        }
        return true;
    default:
        return false;
    }
}

std::optional<std::string> find_left_recursion(const Grammar& grammar)
{
    enum class Mark { White, Grey, Black };
    const auto& clauses = grammar.clauses();
    std::vector<Mark> mark(clauses.size(), Mark::White);

    // Iterative DFS: (clause, next child index).
    std::vector<std::pair<const Clause*, std::size_t>> stack;
    for (const Clause* root : clauses) {
        if (mark[root->index] != Mark::White)
            continue;
        stack.emplace_back(root, 0);
        mark[root->index] = Mark::Grey;
        while (!stack.empty()) {
            auto& [c, i] = stack.back();
            if (i == c->sub_clauses.size()) {
                mark[c->index] = Mark::Black;
                stack.pop_back();
                continue;
            }
            std::size_t k = i++;
            if (!is_same_position_child(*c, k))
                continue;
            const Clause* sub = c->sub_clauses[k];
            if (mark[sub->index] == Mark::Grey)
                return sub->name;
            if (mark[sub->index] == Mark::White) {
                mark[sub->index] = Mark::Grey;
                stack.emplace_back(sub, 0);
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Display

namespace {

bool is_optional_form(const Clause& c)
{
    return c.kind == ClauseKind::First && c.sub_clauses.size() == 2
        && c.sub_clauses[1]->kind == ClauseKind::Nothing;
}

// 0 = First, 1 = Seq, 2 = prefix/label, 3 = suffix/primary/rule name.
int clause_binding(const Clause& c, bool named)
{
    if (named)
        return 3;
    if (is_optional_form(c))
        return 3;
    switch (c.kind) {
    case ClauseKind::First: return 0;
    case ClauseKind::Seq: return 1;
    case ClauseKind::NotFollowedBy: return 2;
    default: return 3;
    }
}

void print_clause(std::string& out, const Clause& c, bool top);

void print_sub(std::string& out, const Clause& parent, std::size_t i, int min_binding)
{
    const Clause& sub = *parent.sub_clauses[i];
    const std::string& label = parent.sub_clause_labels[i];
    bool named = !sub.rule_names.empty();
    int b = label.empty() ? clause_binding(sub, named) : 2;
    bool wrap = b < min_binding;
    if (wrap)
        out += '(';
    if (!label.empty()) {
        out += label;
        out += ':';
        bool inner_wrap = clause_binding(sub, named) < 2;
        if (inner_wrap)
            out += '(';
        print_clause(out, sub, false);
        if (inner_wrap)
            out += ')';
    } else {
        print_clause(out, sub, false);
    }
    if (wrap)
        out += ')';
}

Expr terminal_expr(const Clause& c)
{
    switch (c.kind) {
    case ClauseKind::Char: return expr::chr(c.ch);
    case ClauseKind::CharSet: return expr::charset(c.charset);
    case ClauseKind::String: return expr::str(c.text);
    default: return expr::nothing();
    }
}

void print_clause(std::string& out, const Clause& c, bool top)
{
    if (!top && !c.rule_names.empty()) {
        out += c.name;
        return;
    }
    switch (c.kind) {
    case ClauseKind::Seq:
        for (std::size_t i = 0; i < c.sub_clauses.size(); ++i) {
            if (i)
                out += ' ';
            print_sub(out, c, i, 2);
        }
        break;
    case ClauseKind::First:
        if (is_optional_form(c) && c.sub_clause_labels[1].empty()) {
            print_sub(out, c, 0, 3);
            out += '?';
            break;
        }
        for (std::size_t i = 0; i < c.sub_clauses.size(); ++i) {
            if (i)
                out += " / ";
            print_sub(out, c, i, 1);
        }
        break;
    case ClauseKind::OneOrMore:
        print_sub(out, c, 0, 3);
        out += '+';
        break;
    case ClauseKind::NotFollowedBy:
        out += '!';
        print_sub(out, c, 0, c.sub_clause_labels[0].empty() ? 2 : 3);
        break;
    default:
        out += to_string(terminal_expr(c));
        break;
    }
}

} // namespace

std::string to_string(const Clause& clause)
{
    std::string out;
    print_clause(out, clause, true);
    return out;
}

// ---------------------------------------------------------------------------
// Grammar construction

namespace {

void append_key_text(std::string& key, std::string_view s)
{
    key += std::to_string(s.size());
    key += ':';
    key += s;
}

class ClauseInterner {
public:
    struct PendingRef {
        Clause* parent;
        std::size_t index;
        std::string name;
        std::string label;
        std::size_t source_pos;
    };

    std::vector<std::unique_ptr<Clause>> owned;
    std::vector<PendingRef> pending;
    std::unordered_map<const Clause*, std::size_t> source_pos;

    // `e` must not be a RuleRef.
    Clause* intern(const Expr& e)
    {
        std::string key;
        std::vector<Clause*> subs;
        key_of(e, key, subs);
        auto it = by_key_.find(key);
        if (it != by_key_.end())
            return it->second;

        auto clause = std::make_unique<Clause>();
        Clause* c = clause.get();
        owned.push_back(std::move(clause));
        by_key_.emplace(std::move(key), c);
        source_pos.emplace(c, e.source_pos);

        c->ch = e.ch;
        c->charset = e.charset;
        c->text = e.text;
        switch (e.kind) {
        case ExprKind::Seq: c->kind = ClauseKind::Seq; break;
        case ExprKind::First: c->kind = ClauseKind::First; break;
        case ExprKind::OneOrMore: c->kind = ClauseKind::OneOrMore; break;
        case ExprKind::NotFollowedBy: c->kind = ClauseKind::NotFollowedBy; break;
        case ExprKind::Char: c->kind = ClauseKind::Char; break;
        case ExprKind::CharSet: c->kind = ClauseKind::CharSet; break;
        case ExprKind::String: c->kind = ClauseKind::String; break;
        case ExprKind::Nothing: c->kind = ClauseKind::Nothing; break;
        default:
            throw GrammarError(std::string("unexpected ") + to_string(e.kind) + " after desugaring",
                               e.source_pos);
        }
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            const Expr& child = e.children[i];
            c->sub_clauses.push_back(subs[i]);
            c->sub_clause_labels.push_back(child.label);
            if (child.kind == ExprKind::RuleRef)
                pending.push_back({c, i, child.ref_name, child.label, child.source_pos});
        }
        return c;
    }

private:
    void key_of(const Expr& e, std::string& key, std::vector<Clause*>& subs)
    {
        switch (e.kind) {
        case ExprKind::Char:
            key += 'c';
            key += std::to_string(static_cast<unsigned long>(e.ch));
            return;
        case ExprKind::String:
            if (e.text.empty())
                throw GrammarError("empty string literal", e.source_pos);
            key += 's';
            append_key_text(key, encode_utf8(e.text));
            return;
        case ExprKind::CharSet:
            key += e.charset.negated ? "K" : "k";
            for (auto [lo, hi] : e.charset.ranges) {
                key += std::to_string(static_cast<unsigned long>(lo));
                key += '-';
                key += std::to_string(static_cast<unsigned long>(hi));
                key += ',';
            }
            key += ';';
            return;
        case ExprKind::Nothing:
            key += 'e';
            return;
        default:
            break;
        }
        std::size_t arity = e.children.size();
        bool bad_arity = (e.kind == ExprKind::Seq || e.kind == ExprKind::First) ? arity < 2 : arity != 1;
        if (bad_arity) {
            throw GrammarError(std::string(to_string(e.kind)) + " has " + std::to_string(arity)
                                   + " subclauses",
                               e.source_pos);
        }
        key += to_string(e.kind);
        key += '(';
        for (const Expr& child : e.children) {
            append_key_text(key, child.label);
            if (child.kind == ExprKind::RuleRef) {
                key += '@';
                append_key_text(key, child.ref_name);
                subs.push_back(nullptr);
            } else {
                Clause* sub = intern(child);
                key += '#';
                key += std::to_string(reinterpret_cast<std::uintptr_t>(sub));
                subs.push_back(sub);
            }
            key += ',';
        }
        key += ')';
    }

    std::unordered_map<std::string, Clause*> by_key_;
};

Clause* mut(const Clause* c) { return const_cast<Clause*>(c); }

std::string preferred_rule_name(const Clause& c, const std::unordered_map<std::string, const Rule*>& rules)
{
    const std::string* synthetic = nullptr;
    const std::string* alias = nullptr;
    for (const std::string& n : c.rule_names) {
        const Rule& r = *rules.at(n);
        if (r.synthetic) {
            if (!synthetic)
                synthetic = &n;
        } else if (r.alias) {
            if (!alias)
                alias = &n;
        } else {
            return n;
        }
    }
    if (synthetic)
        return *synthetic;
    return alias ? *alias : std::string();
}

// Names referenced from `e`, other than `self`.
void collect_refs(const Expr& e, const std::string& self, std::unordered_set<std::string>& out)
{
    if (e.kind == ExprKind::RuleRef && e.ref_name != self)
        out.insert(e.ref_name);
    for (const Expr& c : e.children)
        collect_refs(c, self, out);
}

} // namespace

Grammar build_grammar(std::vector<Rule> rules, const BuildOptions& options)
{
    if (rules.empty())
        throw GrammarError("grammar has no rules");

    std::unordered_set<std::string> names;
    for (const Rule& r : rules) {
        if (r.name.empty())
            throw GrammarError("rule with empty name", r.source_pos);
        if (!names.insert(r.name).second)
            throw GrammarError("duplicate rule name '" + r.name + "'", r.source_pos);
    }

    // Desugar and rewrite repetition; helper rules shared between rules are kept once.
    std::vector<Rule> prepared;
    std::unordered_set<std::string> helper_names;
    for (Rule& r : rules) {
        r.clause = desugar(r.clause);
        if (!options.rewrite_one_or_more) {
            prepared.push_back(std::move(r));
            continue;
        }
        for (Rule& out : rewrite_one_or_more(std::move(r))) {
            if (out.synthetic && (names.count(out.name) || !helper_names.insert(out.name).second))
                continue;
            prepared.push_back(std::move(out));
        }
    }

    std::unordered_map<std::string, const Rule*> rule_by_name;
    for (const Rule& r : prepared)
        rule_by_name.emplace(r.name, &r);

    // Intern rule bodies; a body that is a bare reference is an alias.
    ClauseInterner interner;
    std::unordered_map<std::string, Clause*> rule_clause;
    for (const Rule& r : prepared) {
        if (r.clause.kind != ExprKind::RuleRef)
            rule_clause[r.name] = interner.intern(r.clause);
    }
    for (const Rule& r : prepared) {
        if (r.clause.kind != ExprKind::RuleRef)
            continue;
        std::vector<std::string> chain{r.name};
        const Rule* target = &r;
        while (target->clause.kind == ExprKind::RuleRef) {
            const std::string& next = target->clause.ref_name;
            auto it = rule_by_name.find(next);
            if (it == rule_by_name.end())
                throw GrammarError("unknown rule '" + next + "'", target->clause.source_pos);
            if (std::find(chain.begin(), chain.end(), next) != chain.end())
                throw GrammarError("rule '" + r.name + "' refers only to itself", r.source_pos);
            chain.push_back(next);
            target = it->second;
        }
        rule_clause[r.name] = rule_clause.at(target->name);
    }

    // AST label of each rule: its own root label, else that of the rule it aliases.
    std::unordered_map<std::string, std::string> rule_label;
    for (const Rule& r : prepared)
        rule_label[r.name] = r.ast_label();
    for (const Rule& r : prepared) {
        const Rule* t = &r;
        while (rule_label[r.name].empty() && t->clause.kind == ExprKind::RuleRef) {
            t = rule_by_name.at(t->clause.ref_name);
            rule_label[r.name] = rule_label[t->name];
        }
    }

    for (const auto& p : interner.pending) {
        auto it = rule_clause.find(p.name);
        if (it == rule_clause.end())
            throw GrammarError("unknown rule '" + p.name + "'", p.source_pos);
        p.parent->sub_clauses[p.index] = it->second;
        p.parent->sub_clause_labels[p.index] = p.label.empty() ? rule_label.at(p.name) : p.label;
    }

    for (const auto& owned : interner.owned) {
        const Clause& c = *owned;
        if (!c.sub_clauses.empty() && c.sub_clauses[0]->kind == ClauseKind::Nothing) {
            throw GrammarError("() cannot be the first subclause of " + std::string(to_string(c.kind)),
                               interner.source_pos.at(&c));
        }
    }

    for (const Rule& r : prepared) {
        if (!r.one_or_more_chain)
            continue;
        Clause* c = rule_clause.at(r.name);
        if (c->kind == ClauseKind::First)
            c = mut(c->sub_clauses[0]);
        c->one_or_more_chain = true;
    }

    std::vector<const Clause*> roots;
    std::vector<const Clause*> lowest;
    for (const Rule& r : prepared) {
        roots.push_back(rule_clause.at(r.name));
        if (r.lowest_precedence)
            lowest.push_back(rule_clause.at(r.name));
    }
    // The sort needs nullability to tell which subclauses share the parent's start.
    std::vector<Clause*> all;
    for (const auto& owned : interner.owned)
        all.push_back(owned.get());
    compute_can_match_zero_chars(all);
    std::vector<const Clause*> order = topo_sort_clauses(roots, lowest);

    for (std::size_t i = 0; i < order.size(); ++i)
        mut(order[i])->index = static_cast<int>(i);
    for (const Rule& r : prepared) {
        if (rule_clause.at(r.name)->index < 0)
            throw GrammarError("rule '" + r.name + "' is unreachable from every root", r.source_pos);
    }

    std::vector<Clause*> sorted;
    sorted.reserve(order.size());
    for (const Clause* c : order)
        sorted.push_back(mut(c));

    for (const Rule& r : prepared)
        rule_clause.at(r.name)->rule_names.push_back(r.name);
    for (Clause* c : sorted) {
        if (!c->rule_names.empty())
            c->name = preferred_rule_name(*c, rule_by_name);
    }
    for (Clause* c : sorted) {
        if (c->rule_names.empty())
            c->name = to_string(*c);
    }

    compute_can_match_zero_chars(sorted);
    compute_seed_parents(sorted);

    Grammar g;
    g.rewrite_one_or_more_ = options.rewrite_one_or_more;

    for (const Clause* c : sorted) {
        const Clause* repeated = nullptr;
        if (c->kind == ClauseKind::OneOrMore)
            repeated = c->sub_clauses[0];
        else if (c->one_or_more_chain)
            repeated = c->sub_clauses[0];
        if (repeated && repeated->can_match_zero_chars) {
            throw GrammarError("repetition of " + to_string(*repeated)
                                   + ", which can match zero characters",
                               interner.source_pos.at(c));
        }
    }

    for (const Clause* c : sorted) {
        if (c->kind != ClauseKind::First)
            continue;
        for (std::size_t i = 0; i + 1 < c->sub_clauses.size(); ++i) {
            if (c->sub_clauses[i]->can_match_zero_chars) {
                g.warnings_.push_back("in " + c->name + ": alternatives after " + to_string(*c->sub_clauses[i])
                                      + " are unreachable because it can match zero characters");
                break;
            }
        }
    }

    for (const Rule& r : prepared) {
        GrammarRule gr;
        gr.name = r.name;
        gr.clause = rule_clause.at(r.name);
        gr.ast_label = r.synthetic ? std::string() : rule_label.at(r.name);
        gr.precedence = r.precedence;
        gr.associativity = r.associativity;
        gr.synthetic = r.synthetic;
        gr.alias = r.alias;
        g.rules_.push_back(std::move(gr));
    }

    if (!options.start_rule.empty()) {
        g.start_rule_ = g.rule(options.start_rule).name;
    } else {
        std::unordered_set<std::string> referenced;
        for (const Rule& r : prepared)
            collect_refs(r.clause, r.name, referenced);
        auto pick = [&](auto pred) -> const GrammarRule* {
            for (const GrammarRule& r : g.rules_) {
                if (!r.synthetic && pred(r))
                    return &r;
            }
            return nullptr;
        };
        const GrammarRule* start = pick([&](const GrammarRule& r) { return !referenced.count(r.name); });
        if (!start)
            start = pick([](const GrammarRule& r) { return r.alias; });
        if (!start) {
            for (const Rule& r : prepared) {
                if (r.lowest_precedence) {
                    start = &g.rule(r.name);
                    break;
                }
            }
        }
        if (!start) {
            start = &g.rules_.front();
            for (const GrammarRule& r : g.rules_) {
                if (r.clause->index > start->clause->index)
                    start = &r;
            }
        }
        g.start_rule_ = start->name;
    }

    for (Clause* c : sorted) {
        g.clauses_.push_back(c);
        if (c->is_terminal() && c->kind != ClauseKind::Nothing)
            g.terminals_.push_back(c);
    }
    // Clauses that became unreachable (none in practice) are still owned.
    g.owned_ = std::move(interner.owned);
    return g;
}

} // namespace pika
