#pragma once

// The `qcrawl` command line: score, crawl, index, eval, stats (+ synth).
// Results go to files or standard output; diagnostics go to standard error.

#include "qcrawl/analytics.hpp"
#include "qcrawl/corpus_graph.hpp"
#include "qcrawl/crawler.hpp"
#include "qcrawl/error.hpp"
#include "qcrawl/evaluation.hpp"
#include "qcrawl/quality.hpp"
#include "qcrawl/records.hpp"
#include "qcrawl/retrieval.hpp"
#include "qcrawl/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace qcrawl::cli {

namespace fs = std::filesystem;

struct RunConfig {
    std::string input;
    std::string output;
    std::string format;      // "in" or "in:out"
    std::string strategy = "bfs";
    std::size_t budget = 0;
    std::size_t checkpoint_interval = 0;
    std::string seeds;
    std::vector<std::string> scores; // table paths, optionally label=path
    std::string scorer = "table";
    std::string edges;
    std::vector<std::string> traces;
    std::string queries;
    std::string qrels;
    std::size_t k = 100;
    double alpha = 0.01;
    std::size_t bins = 15;
    std::size_t gridsize = 25;
    std::uint64_t min_count = 1000;
    std::uint64_t rng_seed = 0;
    bool undersample = false;
    std::size_t rank = 0;
    // synth
    std::size_t nodes = 2000;
    std::size_t num_queries = 100;
    std::string bias = "homophilic";
};

namespace detail {

struct Formats {
    RecordFormat in;
    RecordFormat out;
};

inline Formats resolve_formats(const RunConfig& c) {
    Formats f{record_format_for(c.input), c.output.empty() ? RecordFormat::Jsonl : record_format_for(c.output)};
    if (c.format.empty()) return f;
    auto colon = c.format.find(':');
    if (colon == std::string::npos) {
        f.in = f.out = parse_record_format(c.format);
    } else {
        f.in = parse_record_format(c.format.substr(0, colon));
        f.out = parse_record_format(c.format.substr(colon + 1));
    }
    return f;
}

/// "label=path" or just "path" (label = file stem).
inline std::pair<std::string, fs::path> labeled(const std::string& arg) {
    auto eq = arg.find('=');
    if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
    return {fs::path(arg).stem().string(), fs::path(arg)};
}

inline void require(const std::string& value, const char* flag) {
    if (value.empty()) throw Error(ErrorCode::InvalidArgument, std::string("missing required flag ") + flag);
}

inline void emit(const std::string& content, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") out << content;
    else qcrawl::detail::write_file(path, content);
}

inline std::string dump(const ordered_json& j) { return qcrawl::detail::dump_json(j) + '\n'; }

inline ordered_json histogram_json(const Histogram& h) {
    ordered_json j;
    j["edges"] = h.edges;
    j["counts"] = h.counts;
    return j;
}

inline ordered_json summary_json(const FiveNumberSummary& s) {
    return ordered_json{{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

} // namespace detail

/// Adds `quality_score` to every record; row order is preserved.
inline int cmd_score(const RunConfig& c, std::ostream& out) {
    detail::require(c.input, "--input");
    auto formats = detail::resolve_formats(c);
    ScorerConfig sc{parse_scorer_kind(c.scorer), std::nullopt};
    if (!c.scores.empty()) sc.table_path = detail::labeled(c.scores.front()).second;
    auto scorer = Scorer::from_config(sc);

    auto rows = read_rows(c.input, formats.in);
    std::vector<DocumentRecord> records;
    records.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.fields.contains("quality_score"))
            throw Error(ErrorCode::DuplicateField,
                        "line " + std::to_string(r.line) + ": record already has a quality_score field");
        records.push_back(record_from_row(r));
    }
    auto scored = score_batch(scorer, records);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].fields["quality_score"] = scored[i].second;
    detail::emit(format_rows(rows, formats.out), c.output, out);
    return 0;
}

/// Simulates one crawl, writes the trace and prints a JSON summary.
inline int cmd_crawl(const RunConfig& c, std::ostream& out) {
    detail::require(c.input, "--input");
    detail::require(c.seeds, "--seeds");
    detail::require(c.output, "--output");
    auto formats = detail::resolve_formats(c);
    auto strategy = parse_strategy(c.strategy);
    auto loaded = load_corpus(c.input, formats.in, c.edges.empty() ? std::nullopt : std::optional<fs::path>(c.edges));
    auto seeds = load_seeds(c.seeds, loaded.graph);

    std::optional<ScoreTable> scores;
    if (strategy == Strategy::QOracle) {
        if (parse_scorer_kind(c.scorer) == ScorerKind::Reference) {
            // pages without tokens stay unscored; the crawl fails only if one is reachable
            ScoreTable t;
            for (const auto& r : loaded.corpus.records())
                if (!tokenize(r.text).empty()) t.insert(r.doc_id, score_text_reference(r.text));
            scores = std::move(t);
        } else {
            if (c.scores.empty()) throw Error(ErrorCode::MissingScore, "qoracle needs --scores or --scorer reference");
            scores = load_score_table(detail::labeled(c.scores.front()).second);
        }
    }
    auto budget = c.budget ? c.budget : loaded.graph.size();
    auto interval = c.checkpoint_interval ? c.checkpoint_interval : budget;
    auto trace = run_crawl(loaded.graph, seeds, strategy, scores ? &*scores : nullptr, {budget, interval});
    write_trace(trace, c.output);

    ordered_json j;
    j["strategy"] = to_string(strategy);
    j["pages_crawled"] = trace.size();
    j["budget"] = budget;
    j["checkpoint_interval"] = interval;
    j["checkpoints"] = trace.checkpoint_ranks;
    j["seeds"] = seeds.size();
    j["records"] = loaded.stats.records;
    j["edges_kept"] = loaded.stats.edges_kept;
    j["dangling_dropped"] = loaded.stats.dangling_dropped;
    j["duplicate_dropped"] = loaded.stats.duplicate_dropped;
    out << detail::dump(j);
    return 0;
}

/// Debug view of a BM25 index over the corpus or over a trace prefix.
inline int cmd_index(const RunConfig& c, std::ostream& out) {
    detail::require(c.input, "--input");
    auto formats = detail::resolve_formats(c);
    auto loaded = load_corpus(c.input, formats.in);
    std::vector<DocId> ids;
    ordered_json j;
    if (!c.traces.empty()) {
        auto [label, path] = detail::labeled(c.traces.front());
        auto trace = read_trace(path);
        auto rank = c.rank ? c.rank : trace.size();
        auto prefix = trace_prefix(trace, rank);
        ids.assign(prefix.begin(), prefix.end());
        j["trace"] = label;
        j["rank"] = rank;
    } else {
        for (const auto& r : loaded.corpus.records()) ids.push_back(r.doc_id);
    }
    auto index = build_index(loaded.corpus, ids);
    j["documents"] = index.doc_count();
    j["avgdl"] = index.avgdl();
    j["terms"] = index.term_count();
    j["postings"] = index.posting_count();
    detail::emit(detail::dump(j), c.output, out);
    return 0;
}

/// Checkpointed R@k per trace plus pairwise significance as JSON-lines.
inline int cmd_eval(const RunConfig& c, std::ostream& out) {
    detail::require(c.input, "--input");
    detail::require(c.queries, "--queries");
    detail::require(c.qrels, "--qrels");
    if (c.traces.empty()) throw Error(ErrorCode::InvalidArgument, "missing required flag --trace");
    auto formats = detail::resolve_formats(c);
    auto loaded = load_corpus(c.input, formats.in);
    std::vector<LabeledTrace> traces;
    for (const auto& t : c.traces) {
        auto [label, path] = detail::labeled(t);
        traces.push_back({label, read_trace(path)});
    }
    auto report = evaluate_checkpoints(loaded.corpus, traces, load_queries(c.queries), load_qrels(c.qrels), c.k, c.alpha);
    auto text = format_eval_report(report);
    if (!report.skipped_queries.empty()) {
        ordered_json j;
        j["type"] = "skipped";
        j["query_ids"] = report.skipped_queries;
        text += detail::dump(j);
    }
    detail::emit(text, c.output, out);
    return 0;
}

/// Score distributions, JS distances, relevance split, correlation and hexbin.
/// Writes stats.json (and hexbin.csv when a corpus is given) into --output,
/// or prints stats.json when --output is absent.
inline int cmd_stats(const RunConfig& c, std::ostream& out) {
    if (c.scores.empty()) throw Error(ErrorCode::InvalidArgument, "missing required flag --scores");
    std::vector<std::pair<std::string, ScoreTable>> tables;
    for (const auto& s : c.scores) {
        auto [label, path] = detail::labeled(s);
        tables.emplace_back(label, load_score_table(path));
        if (tables.back().second.empty()) throw Error(ErrorCode::InvalidArgument, "score table '" + label + "' is empty");
    }

    ordered_json j;
    j["bins"] = c.bins;
    j["rng_seed"] = c.rng_seed;

    std::vector<std::vector<double>> series;
    for (const auto& [label, t] : tables) series.push_back(t.values());
    auto range = shared_range(series);
    std::optional<Range> hrange;
    if (range.lo < range.hi) hrange = range;
    std::vector<Histogram> hists;
    ordered_json hj = ordered_json::array();
    for (std::size_t i = 0; i < tables.size(); ++i) {
        auto r = hrange ? *hrange : Range{range.lo - 0.5, range.hi + 0.5};
        hists.push_back(histogram(series[i], c.bins, r));
        auto h = detail::histogram_json(hists.back());
        h["label"] = tables[i].first;
        h["n"] = series[i].size();
        hj.push_back(std::move(h));
    }
    j["range"] = {range.lo, range.hi};
    j["histograms"] = std::move(hj);

    ordered_json labels = ordered_json::array();
    ordered_json matrix = ordered_json::array();
    for (std::size_t a = 0; a < tables.size(); ++a) {
        labels.push_back(tables[a].first);
        ordered_json row = ordered_json::array();
        for (std::size_t b = 0; b < tables.size(); ++b) row.push_back(js_distance(hists[a], hists[b]));
        matrix.push_back(std::move(row));
    }
    j["js_distance"] = {{"labels", labels}, {"matrix", matrix}};

    const auto& [primary_label, primary] = tables.front();
    if (c.qrels.empty()) {
        j["relevance"] = {{"skipped", "no qrels given"}};
    } else {
        auto split = split_by_relevance(primary, load_qrels(c.qrels));
        ordered_json rj;
        rj["table"] = primary_label;
        rj["relevant_count"] = split.relevant.size();
        rj["irrelevant_count"] = split.irrelevant.size();
        if (split.relevant.empty() || split.irrelevant.empty()) {
            rj["skipped"] = "one side of the split is empty";
        } else {
            rj["relevant_summary"] = detail::summary_json(five_number_summary(split.relevant));
            rj["irrelevant_summary"] = detail::summary_json(five_number_summary(split.irrelevant));
            auto rel = split.relevant, irr = split.irrelevant;
            if (c.undersample) std::tie(rel, irr) = undersample(rel, irr, c.rng_seed);
            rj["undersampled"] = c.undersample;
            rj["histogram_sizes"] = {rel.size(), irr.size()};
            std::vector<std::vector<double>> both{rel, irr};
            auto r = shared_range(both);
            if (!(r.lo < r.hi)) r = {r.lo - 0.5, r.hi + 0.5};
            auto hr = histogram(rel, c.bins, r), hi = histogram(irr, c.bins, r);
            rj["relevant_histogram"] = detail::histogram_json(hr);
            rj["irrelevant_histogram"] = detail::histogram_json(hi);
            rj["js_distance"] = js_distance(hr, hi);
        }
        j["relevance"] = std::move(rj);
    }

    std::string hexbin_csv;
    if (c.input.empty()) {
        j["correlation"] = {{"skipped", "no corpus given"}};
    } else {
        auto formats = detail::resolve_formats(c);
        auto loaded = load_corpus(c.input, formats.in, c.edges.empty() ? std::nullopt : std::optional<fs::path>(c.edges));
        auto study = correlation_study(loaded.graph, primary);
        ordered_json cj;
        cj["table"] = primary_label;
        cj["n"] = study.report.n;
        cj["pearson_r"] = study.report.pearson_r;
        cj["ols_slope"] = study.report.ols_slope;
        cj["ols_intercept"] = study.report.ols_intercept;
        j["correlation"] = std::move(cj);
        auto grid = hexbin(study.points, c.gridsize, c.min_count);
        j["hexbin"] = {{"gridsize", grid.gridsize},
                       {"min_count", grid.min_count},
                       {"cells", grid.cells.size()},
                       {"kept_points", grid.kept_points},
                       {"filtered_points", grid.filtered_points}};
        hexbin_csv = "center_x,center_y,count\n";
        for (const auto& cell : grid.cells)
            hexbin_csv += qcrawl::detail::format_double(cell.center_x) + ',' +
                          qcrawl::detail::format_double(cell.center_y) + ',' + std::to_string(cell.count) + '\n';
    }

    if (c.output.empty() || c.output == "-") {
        out << detail::dump(j);
        return 0;
    }
    fs::create_directories(c.output);
    qcrawl::detail::write_file(fs::path(c.output) / "stats.json", j.dump(2) + '\n');
    if (!hexbin_csv.empty()) qcrawl::detail::write_file(fs::path(c.output) / "hexbin.csv", hexbin_csv);
    return 0;
}

/// Writes a synthetic corpus, seeds, queries and qrels into --output.
inline int cmd_synth(const RunConfig& c, std::ostream& out) {
    detail::require(c.output, "--output");
    SyntheticConfig sc;
    sc.nodes = c.nodes;
    sc.queries = c.num_queries;
    sc.rng_seed = c.rng_seed;
    if (c.bias == "homophilic") sc.bias = LinkBias::Homophilic;
    else if (c.bias == "anti") sc.bias = LinkBias::AntiHomophilic;
    else throw Error(ErrorCode::InvalidArgument, "bias must be homophilic or anti");
    auto world = make_synthetic_world(sc);
    write_synthetic_world(world, c.output);
    ordered_json j{{"nodes", world.records.size()}, {"seeds", world.seeds.size()}, {"queries", world.queries.size()}};
    out << detail::dump(j);
    return 0;
}

/// Parses and runs one invocation. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Crawl prioritisation simulator and quality analytics"};
    app.name("qcrawl");
    app.set_config("--config", "", "TOML/INI file with flag values; command-line flags take precedence");
    app.require_subcommand(1);
    RunConfig c;

    auto add_input = [&](CLI::App* s) {
        s->add_option("--input", c.input, "Record file (JSON-lines or CSV)");
        s->add_option("--format", c.format, "Record formats as in[:out], each jsonl or csv");
    };
    auto add_scoring = [&](CLI::App* s) {
        s->add_option("--scores", c.scores, "Score table(s): doc_id<TAB>score, optionally label=path");
        s->add_option("--scorer", c.scorer, "table or reference")->check(CLI::IsMember({"table", "reference"}));
    };

    auto* score = app.add_subcommand("score", "Add a quality_score field to every record");
    add_input(score);
    add_scoring(score);
    score->add_option("--output", c.output, "Output record file (stdout when absent)");

    auto* crawl = app.add_subcommand("crawl", "Simulate a crawl and write its trace");
    add_input(crawl);
    add_scoring(crawl);
    crawl->add_option("--output", c.output, "Trace file");
    crawl->add_option("--edges", c.edges, "Extra edges: src<TAB>dst per line");
    crawl->add_option("--seeds", c.seeds, "Seed file, one doc_id per line");
    crawl->add_option("--strategy", c.strategy, "bfs, dfs or qoracle")->check(CLI::IsMember({"bfs", "dfs", "qoracle"}));
    crawl->add_option("--budget", c.budget, "Pages to crawl (default: corpus size)")->check(CLI::PositiveNumber);
    crawl->add_option("--checkpoint-interval", c.checkpoint_interval, "Pages between checkpoints")
        ->check(CLI::PositiveNumber);

    auto* index = app.add_subcommand("index", "Print BM25 index statistics");
    add_input(index);
    index->add_option("--trace", c.traces, "Index only a trace prefix");
    index->add_option("--rank", c.rank, "Prefix length (default: whole trace)")->check(CLI::PositiveNumber);
    index->add_option("--output", c.output, "Write the statistics here instead of stdout");

    auto* eval = app.add_subcommand("eval", "Evaluate traces at their checkpoints");
    add_input(eval);
    eval->add_option("--trace", c.traces, "Trace file(s), optionally label=path");
    eval->add_option("--queries", c.queries, "query_id<TAB>text per line");
    eval->add_option("--qrels", c.qrels, "TREC qrels");
    eval->add_option("--k", c.k, "Recall cutoff")->check(CLI::PositiveNumber);
    eval->add_option("--alpha", c.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    eval->add_option("--output", c.output, "Report file (stdout when absent)");

    auto* stats = app.add_subcommand("stats", "Score distribution and homophily statistics");
    add_input(stats);
    stats->add_option("--scores", c.scores, "Score table(s), optionally label=path; the first drives relevance and correlation");
    stats->add_option("--edges", c.edges, "Extra edges: src<TAB>dst per line");
    stats->add_option("--qrels", c.qrels, "TREC qrels for the relevance split");
    stats->add_flag("--undersample", c.undersample, "Undersample the larger relevance group");
    stats->add_option("--bins", c.bins, "Histogram bins")->check(CLI::PositiveNumber);
    stats->add_option("--gridsize", c.gridsize, "Hexbin grid size")->check(CLI::PositiveNumber);
    stats->add_option("--min-count", c.min_count, "Minimum points per reported hexbin cell");
    stats->add_option("--rng-seed", c.rng_seed, "Seed for undersampling");
    stats->add_option("--output", c.output, "Output directory (stdout when absent)");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic crawl world");
    synth->add_option("--output", c.output, "Output directory");
    synth->add_option("--nodes", c.nodes, "Pages")->check(CLI::PositiveNumber);
    synth->add_option("--queries", c.num_queries, "Queries")->check(CLI::PositiveNumber);
    synth->add_option("--bias", c.bias, "homophilic or anti");
    synth->add_option("--rng-seed", c.rng_seed, "Generator seed");

    for (auto* s : {score, crawl, index, eval})
        s->add_option("--rng-seed", c.rng_seed, "Accepted for uniformity; unused");

    std::vector<const char*> argv{"qcrawl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*score) return cmd_score(c, out);
        if (*crawl) return cmd_crawl(c, out);
        if (*index) return cmd_index(c, out);
        if (*eval) return cmd_eval(c, out);
        if (*stats) return cmd_stats(c, out);
        if (*synth) return cmd_synth(c, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace qcrawl::cli
