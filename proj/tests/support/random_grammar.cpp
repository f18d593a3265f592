// random_grammar.cpp - pika PEG parser tests
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "random_grammar.hpp"

namespace pika::testing {

namespace {

class Generator {
public:
    Generator(std::mt19937_64& rng, const RandomGrammarOptions& options, int rule_count)
        : rng_(rng), options_(options), rule_count_(rule_count)
    {}

    Expr expr(int depth)
    {
        if (depth <= 0 || chance(0.35))
            return leaf();
        int pick = uniform(0, options_.surface_forms ? 7 : 4);
        switch (pick) {
        case 0:
        case 1: return expr::seq(items(depth));
        case 2: return expr::first(items(depth));
        case 3: return expr::one_or_more(expr(depth - 1));
        case 4: return expr::not_followed_by(expr(depth - 1));
        case 5: return expr::optional(expr(depth - 1));
        case 6: return expr::zero_or_more(expr(depth - 1));
        default: return expr::followed_by(expr(depth - 1));
        }
    }

private:
    std::vector<Expr> items(int depth)
    {
        std::vector<Expr> out;
        int n = uniform(2, 3);
        for (int i = 0; i < n; ++i)
            out.push_back(expr(depth - 1));
        return out;
    }

    Expr leaf()
    {
        const std::u32string& a = options_.alphabet;
        int pick = uniform(0, 9);
        if (pick <= 2)
            return expr::chr(a[uniform(0, static_cast<int>(a.size()) - 1)]);
        if (pick == 3) {
            char32_t lo = a[uniform(0, static_cast<int>(a.size()) - 1)];
            char32_t hi = a[uniform(0, static_cast<int>(a.size()) - 1)];
            CharSet set;
            set.ranges.push_back({std::min(lo, hi), std::max(lo, hi)});
            set.negated = chance(0.3);
            return expr::charset(set);
        }
        if (pick == 4) {
            std::u32string s;
            int n = uniform(2, 3);
            for (int i = 0; i < n; ++i)
                s += a[uniform(0, static_cast<int>(a.size()) - 1)];
            return expr::str(s);
        }
        if (pick == 5 && chance(0.3))
            return expr::nothing();
        return expr::ref("R" + std::to_string(uniform(0, rule_count_ - 1)));
    }

    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    std::mt19937_64& rng_;
    const RandomGrammarOptions& options_;
    int rule_count_;
};

bool acceptable(const std::vector<Rule>& rules, const RandomGrammarOptions& options)
{
    for (bool rewrite : {true, false}) {
        try {
            BuildOptions build;
            build.rewrite_one_or_more = rewrite;
            Grammar g = build_grammar(rules, build);
            if (g.clauses().size() < options.min_clauses || g.clauses().size() > options.max_clauses)
                return false;
            if (find_left_recursion(g))
                return false;
        } catch (const GrammarError&) {
            return false;
        }
    }
    return true;
}

} // namespace

RandomGrammar random_grammar(std::mt19937_64& rng, const RandomGrammarOptions& options)
{
    for (;;) {
        int rule_count = std::uniform_int_distribution<int>(1, options.max_rules)(rng);
        Generator gen(rng, options, rule_count);
        std::vector<Rule> rules;
        for (int i = 0; i < rule_count; ++i) {
            Rule r;
            r.name = "R" + std::to_string(i);
            r.clause = gen.expr(options.max_depth);
            rules.push_back(std::move(r));
        }
        if (acceptable(rules, options))
            return {std::move(rules), options.alphabet};
    }
}

std::u32string random_input(std::mt19937_64& rng, const std::u32string& alphabet, std::size_t max_len)
{
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
    std::u32string out;
    std::uniform_int_distribution<std::size_t> letter(0, alphabet.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = letter(rng);
        out += k == alphabet.size() ? U'z' : alphabet[k];
    }
    return out;
}

} // namespace pika::testing
