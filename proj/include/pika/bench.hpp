// bench.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_BENCH_HPP
#define PIKA_BENCH_HPP

#include <pika/grammar.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pika {

struct GenOptions {
    std::size_t count = 200;
    int max_depth = 18;
    std::uint64_t seed = 1;
};

// Random arithmetic expressions over integers and identifiers with + - * /,
// unary minus and parentheses. Every compound operand is parenthesized, so
// no two operators of equal precedence are chained. Each expression draws
// its nesting depth uniformly from [1, max_depth]. Deterministic per seed.
std::vector<std::string> generate_expressions(const GenOptions& options);

// ln y = exponent * ln x + ln coefficient, least squares.
struct RegressionFit {
    double exponent = 0;
    double coefficient = 0;
    double r_squared = 0;
};

// nullopt with fewer than two distinct x values. All values must be positive.
std::optional<RegressionFit> fit_power_law(std::span<const double> x, std::span<const double> y);

enum class Engine { Pika, Packrat };

const char* to_string(Engine engine);
std::optional<Engine> parse_engine(std::string_view name);

struct BenchRecord {
    Engine engine = Engine::Pika;
    std::size_t input_id = 0;
    std::size_t input_length = 0;
    std::int64_t parse_nanos = 0;
    std::size_t memo_entries = 0;
    // Length of the start rule's match at 0, if any.
    std::optional<std::size_t> match_len;
};

// Parses `input` with one engine and records the fastest run. Small inputs
// are repeated until `min_total` has elapsed. Grammar preprocessing and
// table destruction are not timed.
BenchRecord time_parse(const Grammar& grammar, Engine engine, const std::u32string& input,
                       std::size_t input_id,
                       std::chrono::nanoseconds min_total = std::chrono::milliseconds(5));

// One record per (input, engine), in input order. `jobs` > 1 parses
// different inputs on separate threads.
std::vector<BenchRecord> run_bench(const Grammar& grammar, std::span<const std::u32string> inputs,
                                   std::span<const Engine> engines, unsigned jobs = 1);

std::string csv_header();
std::string csv_row(const BenchRecord& record);

} // namespace pika

#endif // PIKA_BENCH_HPP
