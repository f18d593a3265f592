// bench.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/bench.hpp>
#include <pika/memo_table.hpp>
#include <pika/packrat.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <thread>

namespace pika {

namespace {

class ExpressionGenerator {
public:
    explicit ExpressionGenerator(std::uint64_t seed) : rng_(seed) {}

    std::string generate(int depth)
    {
        std::string out;
        emit(out, depth);
        return out;
    }

private:
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    void atom(std::string& out)
    {
        int n = uniform(1, 3);
        if (uniform(0, 1) == 0) {
            out += static_cast<char>('1' + uniform(0, 8));
            for (int i = 1; i < n; ++i)
                out += static_cast<char>('0' + uniform(0, 9));
        } else {
            for (int i = 0; i < n; ++i)
                out += static_cast<char>('a' + uniform(0, 25));
        }
    }

    // Operand position: atoms bare, anything else in parentheses.
    void operand(std::string& out, int depth)
    {
        if (depth <= 1) {
            atom(out);
            return;
        }
        out += '(';
        emit(out, depth);
        out += ')';
    }

    void emit(std::string& out, int depth)
    {
        if (depth <= 1) {
            atom(out);
            return;
        }
        int kind = uniform(0, 9);
        if (kind < 7) {
            static constexpr char ops[] = {'+', '-', '*', '/'};
            // One side keeps the full depth so the expression really nests
            // that deep; the other is shallower to keep sizes moderate.
            int other = uniform(1, depth - 1);
            bool left_deep = uniform(0, 1) == 0;
            operand(out, left_deep ? depth - 1 : other);
            out += ops[uniform(0, 3)];
            operand(out, left_deep ? other : depth - 1);
        } else if (kind < 9) {
            out += '-';
            operand(out, depth - 1);
        } else {
            out += '(';
            emit(out, depth - 1);
            out += ')';
        }
    }

    std::mt19937_64 rng_;
};

} // namespace

std::vector<std::string> generate_expressions(const GenOptions& options)
{
    std::mt19937_64 seeder(options.seed);
    std::vector<std::string> out;
    out.reserve(options.count);
    int max_depth = std::max(1, options.max_depth);
    for (std::size_t i = 0; i < options.count; ++i) {
        std::uint64_t s = seeder();
        ExpressionGenerator gen(s);
        int depth = std::uniform_int_distribution<int>(1, max_depth)(seeder);
        out.push_back(gen.generate(depth));
    }
    return out;
}

std::optional<RegressionFit> fit_power_law(std::span<const double> x, std::span<const double> y)
{
    std::size_t n = std::min(x.size(), y.size());
    std::set<double> distinct(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    if (distinct.size() < 2)
        return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = std::log(x[i]) - mx;
        double dy = std::log(y[i]) - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    RegressionFit fit;
    fit.exponent = sxy / sxx;
    fit.coefficient = std::exp(my - fit.exponent * mx);
    fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

const char* to_string(Engine engine) { return engine == Engine::Pika ? "pika" : "packrat"; }

std::optional<Engine> parse_engine(std::string_view name)
{
    if (name == "pika")
        return Engine::Pika;
    if (name == "packrat")
        return Engine::Packrat;
    return std::nullopt;
}

BenchRecord time_parse(const Grammar& grammar, Engine engine, const std::u32string& input,
                       std::size_t input_id, std::chrono::nanoseconds min_total)
{
    using clock = std::chrono::steady_clock;
    BenchRecord rec;
    rec.engine = engine;
    rec.input_id = input_id;
    rec.input_length = input.size();
    const Clause& start = *grammar.rule(grammar.start_rule()).clause;

    std::chrono::nanoseconds best = std::chrono::nanoseconds::max();
    std::chrono::nanoseconds total{0};
    do {
        std::u32string copy = input;
        if (engine == Engine::Pika) {
            auto t0 = clock::now();
            MemoTable table = parse(grammar, std::move(copy));
            auto t1 = clock::now();
            best = std::min(best, std::chrono::nanoseconds(t1 - t0));
            total += t1 - t0;
            rec.memo_entries = table.entry_count();
            const Match* m = table.look_up_best_match(start, 0);
            rec.match_len = m ? std::optional<std::size_t>(m->len) : std::nullopt;
        } else {
            auto t0 = clock::now();
            PackratParser p(grammar, std::move(copy));
            const Match* m = p.match(start, 0);
            auto t1 = clock::now();
            best = std::min(best, std::chrono::nanoseconds(t1 - t0));
            total += t1 - t0;
            rec.memo_entries = p.entry_count();
            rec.match_len = m ? std::optional<std::size_t>(m->len) : std::nullopt;
        }
    } while (total < min_total);
    rec.parse_nanos = std::max<std::int64_t>(1, best.count());
    return rec;
}

std::vector<BenchRecord> run_bench(const Grammar& grammar, std::span<const std::u32string> inputs,
                                   std::span<const Engine> engines, unsigned jobs)
{
    std::vector<BenchRecord> out(inputs.size() * engines.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < inputs.size();) {
            for (std::size_t e = 0; e < engines.size(); ++e)
                out[i * engines.size() + e] = time_parse(grammar, engines[e], inputs[i], i);
        }
    };
    jobs = std::max(1u, jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        for (unsigned j = 0; j < jobs; ++j)
            threads.emplace_back(worker);
    }
    return out;
}

std::string csv_header() { return "engine,input_id,input_length,parse_nanos,memo_entries"; }

std::string csv_row(const BenchRecord& r)
{
    return std::string(to_string(r.engine)) + ',' + std::to_string(r.input_id) + ','
        + std::to_string(r.input_length) + ',' + std::to_string(r.parse_nanos) + ','
        + std::to_string(r.memo_entries);
}

} // namespace pika
