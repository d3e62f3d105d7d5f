#pragma once

// Crawl simulation over a stored web graph. A crawl starts from seed pages,
// repeatedly selects one frontier page, records it, and discovers its
// outlinks. Every page is discovered at most once and its priority is fixed
// at discovery.

#include "qcrawl/corpus_graph.hpp"
#include "qcrawl/detail/io.hpp"
#include "qcrawl/detail/text.hpp"
#include "qcrawl/error.hpp"
#include "qcrawl/quality.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qcrawl {

enum class Strategy { Bfs, Dfs, QOracle };

inline std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::Bfs: return "bfs";
    case Strategy::Dfs: return "dfs";
    case Strategy::QOracle: return "qoracle";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view s) {
    if (s == "bfs" || s == "BFS") return Strategy::Bfs;
    if (s == "dfs" || s == "DFS") return Strategy::Dfs;
    if (s == "qoracle" || s == "QORACLE" || s == "QOracle") return Strategy::QOracle;
    throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(s) + "'");
}

struct FrontierEntry {
    NodeIndex node = 0;
    QualityScore priority = 0.0;
    std::uint64_t discovery_seq = 0;
};

struct TraceEntry {
    std::size_t rank = 0; // 1-based
    DocId doc_id;
    std::optional<QualityScore> priority; // empty for strategies without scores

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct CrawlTrace {
    std::vector<TraceEntry> entries;
    std::vector<std::size_t> checkpoint_ranks;

    std::size_t size() const noexcept { return entries.size(); }
    friend bool operator==(const CrawlTrace&, const CrawlTrace&) = default;
};

struct CrawlLimits {
    std::size_t budget = 0;
    std::size_t checkpoint_interval = 0;
};

/// Multiples of `interval` up to `length`, plus `length` itself when missing.
inline std::vector<std::size_t> checkpoint_ranks_for(std::size_t length, std::size_t interval) {
    std::vector<std::size_t> ranks;
    for (std::size_t r = interval; r <= length; r += interval) ranks.push_back(r);
    if (length > 0 && (ranks.empty() || ranks.back() != length)) ranks.push_back(length);
    return ranks;
}

namespace detail {

struct OracleOrder {
    const WebGraph* graph;
    // true when a should be popped after b
    bool operator()(const FrontierEntry& a, const FrontierEntry& b) const {
        if (a.priority != b.priority) return a.priority < b.priority;
        if (a.discovery_seq != b.discovery_seq) return a.discovery_seq > b.discovery_seq;
        return graph->id(a.node) > graph->id(b.node);
    }
};

inline std::vector<NodeIndex> reachable_from(const WebGraph& graph, std::span<const NodeIndex> seeds) {
    std::vector<char> seen(graph.size(), 0);
    std::vector<NodeIndex> stack(seeds.begin(), seeds.end()), out;
    for (auto s : seeds) seen[s] = 1;
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        out.push_back(n);
        for (auto t : graph.successors(n))
            if (!seen[t]) {
                seen[t] = 1;
                stack.push_back(t);
            }
    }
    return out;
}

} // namespace detail

/// Simulates one crawl.
///
/// BFS pops in discovery order. DFS pops the most recently pushed page, and
/// newly found outlinks are pushed in reverse so the first-listed link is
/// crawled next (seeds are treated the same way). QOracle pops the highest
/// score, breaking ties by earlier discovery and then by smaller doc_id.
///
/// `scores` is required for QOracle and must cover every page reachable from
/// the seeds; it is ignored otherwise.
inline CrawlTrace run_crawl(const WebGraph& graph, std::span<const DocId> seed_ids, Strategy strategy,
                            const ScoreTable* scores, CrawlLimits limits) {
    if (limits.budget == 0) throw Error(ErrorCode::InvalidArgument, "budget must be positive");
    if (limits.checkpoint_interval == 0) throw Error(ErrorCode::InvalidArgument, "checkpoint interval must be positive");

    std::vector<NodeIndex> seeds;
    {
        std::unordered_set<NodeIndex> seen;
        for (const auto& id : seed_ids) {
            auto n = graph.index_of(id);
            if (seen.insert(n).second) seeds.push_back(n);
        }
    }
    if (seeds.empty()) throw Error(ErrorCode::EmptySeeds, "seed list is empty");

    std::vector<QualityScore> priority;
    if (strategy == Strategy::QOracle) {
        if (!scores) throw Error(ErrorCode::MissingScore, "qoracle crawl requires a score table");
        priority.assign(graph.size(), 0.0);
        for (auto n : detail::reachable_from(graph, seeds)) {
            auto q = scores->find(graph.id(n));
            if (!q) throw Error(ErrorCode::MissingScore, "no score for reachable page '" + graph.id(n) + "'");
            priority[n] = *q;
        }
    }

    std::vector<char> discovered(graph.size(), 0);
    std::uint64_t next_seq = 0;
    std::deque<NodeIndex> queue;
    std::vector<NodeIndex> stack;
    std::priority_queue<FrontierEntry, std::vector<FrontierEntry>, detail::OracleOrder> heap(
        detail::OracleOrder{&graph});

    auto discover_all = [&](std::span<const NodeIndex> nodes) {
        std::vector<NodeIndex> fresh;
        for (auto n : nodes) {
            if (discovered[n]) continue;
            discovered[n] = 1;
            fresh.push_back(n);
            if (strategy == Strategy::QOracle) heap.push({n, priority[n], next_seq});
            ++next_seq;
        }
        if (strategy == Strategy::Bfs) queue.insert(queue.end(), fresh.begin(), fresh.end());
        else if (strategy == Strategy::Dfs) stack.insert(stack.end(), fresh.rbegin(), fresh.rend());
    };

    auto frontier_empty = [&] {
        switch (strategy) {
        case Strategy::Bfs: return queue.empty();
        case Strategy::Dfs: return stack.empty();
        case Strategy::QOracle: return heap.empty();
        }
        return true;
    };

    auto pop = [&]() -> NodeIndex {
        NodeIndex n = 0;
        switch (strategy) {
        case Strategy::Bfs: n = queue.front(); queue.pop_front(); break;
        case Strategy::Dfs: n = stack.back(); stack.pop_back(); break;
        case Strategy::QOracle: n = heap.top().node; heap.pop(); break;
        }
        return n;
    };

    CrawlTrace trace;
    discover_all(seeds);
    while (trace.entries.size() < limits.budget && !frontier_empty()) {
        auto n = pop();
        TraceEntry e{trace.entries.size() + 1, graph.id(n), std::nullopt};
        if (strategy == Strategy::QOracle) e.priority = priority[n];
        trace.entries.push_back(std::move(e));
        discover_all(graph.successors(n));
    }
    trace.checkpoint_ranks = checkpoint_ranks_for(trace.entries.size(), limits.checkpoint_interval);
    return trace;
}

inline std::string format_trace(const CrawlTrace& trace) {
    std::string out = "#checkpoints";
    for (auto r : trace.checkpoint_ranks) out += '\t' + std::to_string(r);
    out += '\n';
    for (const auto& e : trace.entries) {
        out += std::to_string(e.rank);
        out += '\t';
        out += e.doc_id;
        out += '\t';
        out += e.priority ? detail::format_double(*e.priority) : std::string("-");
        out += '\n';
    }
    return out;
}

inline void write_trace(const CrawlTrace& trace, const std::filesystem::path& path) {
    detail::write_file(path, format_trace(trace));
}

inline CrawlTrace parse_trace(std::string_view data) {
    CrawlTrace trace;
    bool have_header = false;
    std::unordered_set<std::string> ids;
    std::size_t line_no = 0;
    for (auto line : detail::split(data, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto where = "trace line " + std::to_string(line_no) + ": ";
        auto parts = detail::split(line, '\t');
        if (line.front() == '#') {
            if (parts[0] != "#checkpoints") continue;
            for (std::size_t i = 1; i < parts.size(); ++i) {
                auto r = detail::parse_int<std::size_t>(parts[i]);
                if (!r) throw Error(ErrorCode::Parse, where + "bad checkpoint '" + std::string(parts[i]) + "'");
                trace.checkpoint_ranks.push_back(*r);
            }
            have_header = true;
            continue;
        }
        if (parts.size() != 3) throw Error(ErrorCode::Parse, where + "expected rank<TAB>doc_id<TAB>priority");
        auto rank = detail::parse_int<std::size_t>(parts[0]);
        if (!rank || *rank != trace.entries.size() + 1) throw Error(ErrorCode::Parse, where + "ranks must run 1, 2, 3, ...");
        if (!ids.insert(std::string(parts[1])).second)
            throw Error(ErrorCode::Parse, where + "doc_id '" + std::string(parts[1]) + "' repeats");
        TraceEntry e{*rank, std::string(parts[1]), std::nullopt};
        if (parts[2] != "-") {
            auto p = detail::parse_double(parts[2]);
            if (!p) throw Error(ErrorCode::Parse, where + "bad priority '" + std::string(parts[2]) + "'");
            e.priority = *p;
        }
        trace.entries.push_back(std::move(e));
    }
    if (!have_header) throw Error(ErrorCode::Parse, "trace has no #checkpoints header");
    for (std::size_t i = 0; i < trace.checkpoint_ranks.size(); ++i) {
        auto r = trace.checkpoint_ranks[i];
        if (r < 1 || r > trace.entries.size() || (i > 0 && r <= trace.checkpoint_ranks[i - 1]))
            throw Error(ErrorCode::Parse, "checkpoint " + std::to_string(r) + " out of order or range");
    }
    return trace;
}

inline CrawlTrace read_trace(const std::filesystem::path& path) { return parse_trace(detail::read_file(path)); }

/// The first `rank` crawled ids.
inline std::set<DocId> trace_prefix(const CrawlTrace& trace, std::size_t rank) {
    if (rank < 1 || rank > trace.entries.size())
        throw Error(ErrorCode::OutOfRange, "rank " + std::to_string(rank) + " outside [1, " +
                                               std::to_string(trace.entries.size()) + "]");
    std::set<DocId> out;
    for (std::size_t i = 0; i < rank; ++i) out.insert(trace.entries[i].doc_id);
    return out;
}

} // namespace qcrawl
