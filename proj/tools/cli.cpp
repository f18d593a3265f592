// cli.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "cli.hpp"

#include <pika/bench.hpp>
#include <pika/memo_table.hpp>
#include <pika/meta_grammar.hpp>
#include <pika/packrat.hpp>
#include <pika/recovery.hpp>
#include <pika/serialize.hpp>
#include <pika/tree.hpp>
#include <pika/unicode.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace pika {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    if (path == "-")
        return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct GrammarFlags {
    std::string grammar_path;
    std::string start_rule;
    bool no_rewrite = false;
};

Grammar load_grammar(const GrammarFlags& flags, std::ostream& err)
{
    BuildOptions options;
    options.rewrite_one_or_more = !flags.no_rewrite;
    options.start_rule = flags.start_rule;
    Grammar g = compile_grammar(read_file(flags.grammar_path), options, flags.grammar_path);
    for (const std::string& w : g.warnings())
        err << "warning: " << w << '\n';
    return g;
}

struct ParseFlags {
    GrammarFlags grammar;
    std::string input_path;
    bool ast = false;
    std::string format = "json";
    std::vector<std::string> recover_rules;
    std::string engine = "pika";
};

int cmd_parse(const ParseFlags& flags, std::ostream& out, std::ostream& err)
{
    auto engine = parse_engine(flags.engine);
    if (!engine)
        throw UsageError("unknown engine '" + flags.engine + "'");
    if (*engine == Engine::Packrat && !flags.recover_rules.empty())
        throw UsageError("--recover-rule needs the pika engine");

    Grammar g = load_grammar(flags.grammar, err);
    std::u32string input = decode_utf8(read_file(flags.input_path));
    const GrammarRule& start = g.rule(g.start_rule());

    std::optional<ParseTreeNode> tree;
    std::vector<ErrorSpan> spans;
    std::optional<MemoTable> table;
    std::optional<PackratParser> packrat;
    if (*engine == Engine::Pika) {
        table.emplace(parse(g, input));
        tree = extract_parse_tree(*table, start.name, 0);
        std::vector<std::string> rules = flags.recover_rules;
        if (rules.empty())
            rules.push_back(start.name);
        spans = find_error_spans(*table, rules);
    } else {
        packrat.emplace(g, input);
        if (const Match* m = packrat->match(*start.clause, 0))
            tree = build_parse_tree(*m, start.name, start.ast_label);
        std::size_t covered = tree ? tree->len : 0;
        if (covered < input.size())
            spans.push_back({static_cast<Pos>(covered), static_cast<Pos>(input.size()), nullptr});
    }
    if (tree)
        tree = flatten_one_or_more(std::move(*tree));

    bool full = tree && tree->len == input.size();
    bool ok = full && spans.empty();

    std::optional<AstNode> ast;
    if (tree && flags.ast)
        ast = to_ast(*tree, input);

    if (flags.format == "sexpr") {
        if (flags.ast && ast)
            out << to_sexpr(*ast) << '\n';
        else if (flags.ast && tree)
            out << "()\n";
        else if (tree)
            out << to_sexpr(*tree) << '\n';
        for (const ErrorSpan& s : spans) {
            out << "(error " << s.start << ' ' << s.end << ' '
                << nlohmann::ordered_json(encode_utf8(input.substr(s.start, s.end - s.start))).dump();
            if (s.following_match)
                out << " (recovery " << s.following_match->start << ' ' << s.following_match->len << ')';
            out << ")\n";
        }
    } else {
        nlohmann::ordered_json body = nullptr;
        if (flags.ast && ast)
            body = to_json(*ast);
        else if (!flags.ast && tree)
            body = to_json(*tree);
        if (ok && flags.recover_rules.empty()) {
            out << body.dump(2) << '\n';
        } else {
            nlohmann::ordered_json report = {{"matched", full},
                                     {flags.ast ? "ast" : "tree", body},
                                     {"errors", to_json(spans, input)}};
            out << report.dump(2) << '\n';
        }
    }
    if (!ok)
        err << "syntax errors: " << spans.size() << " unmatched span(s)\n";
    return ok ? exit_ok : exit_syntax_errors;
}

struct GenFlags {
    GenOptions options;
};

struct BenchFlags {
    GrammarFlags grammar;
    std::string corpus;
    GenOptions gen;
    std::string engines = "pika";
    std::string csv_path;
    unsigned jobs = 1;
};

std::vector<std::u32string> load_corpus(const BenchFlags& flags)
{
    std::vector<std::u32string> inputs;
    if (flags.corpus.empty()) {
        for (const std::string& s : generate_expressions(flags.gen))
            inputs.push_back(decode_utf8(s));
    } else if (fs::is_directory(flags.corpus)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(flags.corpus)) {
            if (entry.is_regular_file())
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& f : files)
            inputs.push_back(decode_utf8(read_file(f.string())));
    } else {
        std::istringstream lines(read_file(flags.corpus));
        for (std::string line; std::getline(lines, line);) {
            if (!line.empty())
                inputs.push_back(decode_utf8(line));
        }
    }
    return inputs;
}

int cmd_bench(const BenchFlags& flags, std::ostream& out, std::ostream& err)
{
    std::vector<Engine> engines;
    std::stringstream names(flags.engines);
    for (std::string name; std::getline(names, name, ',');) {
        auto e = parse_engine(name);
        if (!e)
            throw UsageError("unknown engine '" + name + "'");
        engines.push_back(*e);
    }
    if (engines.empty())
        throw UsageError("no engines given");

    Grammar g = load_grammar(flags.grammar, err);
    std::vector<std::u32string> inputs = load_corpus(flags);
    if (inputs.empty())
        throw UsageError("corpus is empty");

    std::vector<BenchRecord> records = run_bench(g, inputs, engines, flags.jobs);

    std::ofstream csv_file;
    std::ostream* csv = &out;
    if (!flags.csv_path.empty()) {
        csv_file.open(flags.csv_path);
        if (!csv_file)
            throw UsageError("cannot write " + flags.csv_path);
        csv = &csv_file;
    }
    *csv << csv_header() << '\n';
    for (const BenchRecord& r : records)
        *csv << csv_row(r) << '\n';

    int status = exit_ok;
    for (std::size_t e = 0; e < engines.size(); ++e) {
        std::vector<double> x, y;
        for (std::size_t i = e; i < records.size(); i += engines.size()) {
            x.push_back(static_cast<double>(std::max<std::size_t>(1, records[i].input_length)));
            y.push_back(static_cast<double>(records[i].parse_nanos));
        }
        if (auto fit = fit_power_law(x, y)) {
            out << "# " << to_string(engines[e]) << ": parse_nanos = " << fit->coefficient << " * length^"
                << fit->exponent << ", r^2 = " << fit->r_squared << ", n = " << x.size() << '\n';
        } else {
            out << "# " << to_string(engines[e]) << ": fit undefined (fewer than two distinct lengths); "
                << "parse_nanos = " << static_cast<std::int64_t>(y.front()) << '\n';
        }
    }
    if (engines.size() > 1) {
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < records.size(); i += engines.size()) {
            for (std::size_t e = 1; e < engines.size(); ++e) {
                if (records[i + e].match_len != records[i].match_len)
                    ++mismatches;
            }
        }
        out << "# engines agree on " << (records.size() / engines.size() - mismatches) << " of "
            << records.size() / engines.size() << " inputs\n";
        if (mismatches) {
            err << "engines disagree on " << mismatches << " input(s)\n";
            status = exit_syntax_errors;
        }
    }
    return status;
}

void add_grammar_flags(CLI::App* cmd, GrammarFlags& flags)
{
    cmd->add_option("--grammar", flags.grammar_path, "Grammar file")->required();
    cmd->add_option("--start-rule", flags.start_rule, "Rule to match at position 0");
    cmd->add_flag("--no-oneormore-rewrite", flags.no_rewrite,
                  "Keep repetition as a single greedy node instead of a right-recursive list");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"pika: bottom-up PEG parser"};
    app.require_subcommand(1);

    ParseFlags parse_flags;
    auto* parse_cmd = app.add_subcommand("parse", "Parse an input file");
    add_grammar_flags(parse_cmd, parse_flags.grammar);
    parse_cmd->add_option("--input", parse_flags.input_path, "Input file, - for stdin")->required();
    parse_cmd->add_flag("--ast", parse_flags.ast, "Print the AST instead of the parse tree");
    parse_cmd->add_option("--format", parse_flags.format, "Output format")
        ->check(CLI::IsMember({"json", "sexpr"}));
    parse_cmd->add_option("--recover-rule", parse_flags.recover_rules,
                          "Report input not covered by matches of this rule (repeatable)");
    parse_cmd->add_option("--engine", parse_flags.engine, "pika or packrat")
        ->check(CLI::IsMember({"pika", "packrat"}));

    GenFlags gen_flags;
    auto* gen_cmd = app.add_subcommand("gen", "Print random arithmetic expressions, one per line");
    gen_cmd->add_option("--count", gen_flags.options.count)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--max-depth", gen_flags.options.max_depth)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen_flags.options.seed);

    BenchFlags bench_flags;
    auto* bench_cmd = app.add_subcommand("bench", "Time parses and fit parse time against input length");
    add_grammar_flags(bench_cmd, bench_flags.grammar);
    bench_cmd->add_option("--corpus", bench_flags.corpus,
                          "Directory of inputs, or file with one input per line; default generates expressions");
    bench_cmd->add_option("--count", bench_flags.gen.count)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--max-depth", bench_flags.gen.max_depth)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench_flags.gen.seed);
    bench_cmd->add_option("--engines", bench_flags.engines, "Comma-separated: pika,packrat");
    bench_cmd->add_option("--engine", bench_flags.engines, "Same as --engines");
    bench_cmd->add_option("--csv", bench_flags.csv_path, "Write records here instead of stdout");
    bench_cmd->add_option("--jobs", bench_flags.jobs, "Parse inputs on this many threads")
        ->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*parse_cmd)
            return cmd_parse(parse_flags, out, err);
        if (*gen_cmd) {
            for (const std::string& s : generate_expressions(gen_flags.options))
                out << s << '\n';
            return exit_ok;
        }
        return cmd_bench(bench_flags, out, err);
    } catch (const GrammarError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
    }
    return exit_usage;
}

} // namespace pika
