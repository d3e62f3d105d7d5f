#pragma once

// Checkpointed retrieval evaluation of crawl traces: at each checkpoint the
// crawled prefix is indexed with BM25 and every judged query is run.

#include "qcrawl/crawler.hpp"
#include "qcrawl/detail/parallel.hpp"
#include "qcrawl/error.hpp"
#include "qcrawl/records.hpp"
#include "qcrawl/retrieval.hpp"
#include "qcrawl/significance.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qcrawl {

struct CheckpointRecall {
    std::string strategy;
    std::size_t checkpoint = 0;
    std::vector<std::pair<QueryId, double>> per_query; // evaluated queries, in query-file order
    double mean = 0.0;
};

struct CheckpointSignificance {
    std::size_t checkpoint = 0;
    PairSignificance result;
};

struct EvalReport {
    std::size_t k = 0;
    double alpha = 0.0;
    std::vector<QueryId> skipped_queries;
    std::vector<CheckpointRecall> recalls;
    std::vector<CheckpointSignificance> significance;

    const CheckpointRecall* find(std::string_view strategy, std::size_t checkpoint) const {
        for (const auto& r : recalls)
            if (r.strategy == strategy && r.checkpoint == checkpoint) return &r;
        return nullptr;
    }

    const PairSignificance* find_pair(std::string_view a, std::string_view b, std::size_t checkpoint) const {
        for (const auto& s : significance)
            if (s.checkpoint == checkpoint &&
                ((s.result.a == a && s.result.b == b) || (s.result.a == b && s.result.b == a)))
                return &s.result;
        return nullptr;
    }
};

struct LabeledTrace {
    std::string label;
    CrawlTrace trace;
};

/// Checkpoint ranks shared by every trace.
inline std::vector<std::size_t> common_checkpoints(const std::vector<LabeledTrace>& traces) {
    if (traces.empty()) return {};
    std::vector<std::size_t> common = traces.front().trace.checkpoint_ranks;
    for (const auto& t : traces) {
        std::vector<std::size_t> next;
        std::set_intersection(common.begin(), common.end(), t.trace.checkpoint_ranks.begin(),
                              t.trace.checkpoint_ranks.end(), std::back_inserter(next));
        common = std::move(next);
    }
    return common;
}

/// Evaluates every trace at every common checkpoint. Queries without relevant
/// documents are skipped. With two or more traces each checkpoint also gets a
/// Bonferroni-corrected paired t-test across strategies.
inline EvalReport evaluate_checkpoints(const Corpus& corpus, const std::vector<LabeledTrace>& traces,
                                       const std::vector<Query>& queries, const Qrels& qrels, std::size_t k,
                                       double alpha) {
    if (traces.empty()) throw Error(ErrorCode::InvalidArgument, "no traces to evaluate");
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
    {
        std::set<std::string> labels;
        for (const auto& t : traces)
            if (!labels.insert(t.label).second)
                throw Error(ErrorCode::InvalidArgument, "duplicate trace label '" + t.label + "'");
    }
    auto checkpoints = common_checkpoints(traces);
    if (checkpoints.empty()) throw Error(ErrorCode::CheckpointMismatch, "traces share no checkpoint");

    EvalReport report;
    report.k = k;
    report.alpha = alpha;
    std::vector<const Query*> active;
    std::vector<std::vector<std::string>> terms;
    for (const auto& q : queries) {
        if (qrels.relevant(q.id).empty()) {
            report.skipped_queries.push_back(q.id);
            continue;
        }
        active.push_back(&q);
        terms.push_back(tokenize(q.text));
    }

    for (auto cp : checkpoints) {
        std::vector<std::pair<std::string, std::vector<double>>> aligned;
        for (const auto& t : traces) {
            auto index = build_index(corpus, trace_prefix(t.trace, cp));
            std::vector<double> recall(active.size());
            detail::parallel_for(
                active.size(),
                [&](std::size_t i) {
                    auto ranked = search_topk(index, terms[i], k);
                    recall[i] = *recall_at_k(ranked, qrels, active[i]->id, k);
                },
                16);
            CheckpointRecall row;
            row.strategy = t.label;
            row.checkpoint = cp;
            double sum = 0.0;
            for (std::size_t i = 0; i < active.size(); ++i) {
                row.per_query.emplace_back(active[i]->id, recall[i]);
                sum += recall[i];
            }
            row.mean = active.empty() ? 0.0 : sum / static_cast<double>(active.size());
            report.recalls.push_back(std::move(row));
            aligned.emplace_back(t.label, std::move(recall));
        }
        if (traces.size() >= 2 && active.size() >= 2)
            for (auto& s : paired_t_test_bonferroni(aligned, alpha)) report.significance.push_back({cp, std::move(s)});
    }
    return report;
}

namespace detail {

// JSON cannot hold infinities; they are written as strings.
inline ordered_json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

} // namespace detail

/// One JSON object per (strategy, checkpoint), then one per significance pair.
inline std::string format_eval_report(const EvalReport& report) {
    std::string out;
    for (const auto& r : report.recalls) {
        ordered_json j;
        j["type"] = "recall";
        j["strategy"] = r.strategy;
        j["checkpoint"] = r.checkpoint;
        j["k"] = report.k;
        j["queries"] = r.per_query.size();
        j["mean_recall"] = r.mean;
        ordered_json pq = ordered_json::array();
        for (const auto& [q, v] : r.per_query) pq.push_back({{"query_id", q}, {"recall", v}});
        j["per_query"] = std::move(pq);
        out += detail::dump_json(j) + '\n';
    }
    for (const auto& s : report.significance) {
        ordered_json j;
        j["type"] = "significance";
        j["checkpoint"] = s.checkpoint;
        j["a"] = s.result.a;
        j["b"] = s.result.b;
        j["t"] = detail::json_number(s.result.t);
        j["p_raw"] = s.result.p_raw;
        j["p_corrected"] = s.result.p_corrected;
        j["alpha"] = report.alpha;
        j["significant"] = s.result.significant;
        out += detail::dump_json(j) + '\n';
    }
    return out;
}

} // namespace qcrawl
