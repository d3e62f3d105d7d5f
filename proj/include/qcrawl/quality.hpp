#pragma once

#include "qcrawl/corpus_graph.hpp"
#include "qcrawl/detail/io.hpp"
#include "qcrawl/detail/parallel.hpp"
#include "qcrawl/detail/text.hpp"
#include "qcrawl/error.hpp"
#include "qcrawl/tokenize.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace qcrawl {

/// Quality scores carry log-probability semantics: usually <= 0, always finite.
using QualityScore = double;

/// doc_id -> score, remembering insertion order for reproducible iteration.
class ScoreTable {
public:
    void insert(const DocId& id, QualityScore q) {
        if (!std::isfinite(q)) throw Error(ErrorCode::NonFiniteScore, "non-finite score for '" + id + "'");
        if (!index_.emplace(id, entries_.size()).second)
            throw Error(ErrorCode::DuplicateDoc, "duplicate score entry for '" + id + "'");
        entries_.emplace_back(id, q);
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

    std::optional<QualityScore> find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return entries_[it->second].second;
    }

    QualityScore at(std::string_view id) const {
        auto q = find(id);
        if (!q) throw Error(ErrorCode::MissingScore, "no score for '" + std::string(id) + "'");
        return *q;
    }

    const std::vector<std::pair<DocId, QualityScore>>& entries() const noexcept { return entries_; }

    std::vector<QualityScore> values() const {
        std::vector<QualityScore> v;
        v.reserve(entries_.size());
        for (const auto& e : entries_) v.push_back(e.second);
        return v;
    }

private:
    std::vector<std::pair<DocId, QualityScore>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// `doc_id<TAB>score` per line. Blank lines and `#` comments are skipped.
inline ScoreTable parse_score_table(std::string_view data) {
    ScoreTable table;
    std::size_t line_no = 0;
    for (auto line : detail::split(data, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (detail::trim(line).empty() || line.front() == '#') continue;
        auto parts = detail::split(line, '\t');
        auto where = "line " + std::to_string(line_no) + ": ";
        if (parts.size() != 2 || parts[0].empty())
            throw Error(ErrorCode::Parse, where + "expected doc_id<TAB>score");
        auto v = detail::parse_double(detail::trim(parts[1]));
        if (!v) throw Error(ErrorCode::Parse, where + "bad score '" + std::string(parts[1]) + "'");
        try {
            table.insert(std::string(parts[0]), *v);
        } catch (const Error& e) {
            throw Error(e.code(), where + e.what());
        }
    }
    return table;
}

inline ScoreTable load_score_table(const std::filesystem::path& path) {
    return parse_score_table(detail::read_file(path));
}

inline std::string format_score_table(const ScoreTable& table) {
    std::string out;
    for (const auto& [id, q] : table.entries()) out += id + '\t' + detail::format_double(q) + '\n';
    return out;
}

/// Deterministic model-free scorer: ln(distinct tokens / total tokens).
/// Zero exactly when every token is distinct; more repetition scores lower.
inline QualityScore score_text_reference(std::string_view text) {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw Error(ErrorCode::EmptyText, "text has no tokens");
    std::unordered_set<std::string_view> distinct(tokens.begin(), tokens.end());
    return std::log(static_cast<double>(distinct.size()) / static_cast<double>(tokens.size()));
}

enum class ScorerKind { Table, Reference };

inline ScorerKind parse_scorer_kind(std::string_view s) {
    if (s == "table") return ScorerKind::Table;
    if (s == "reference") return ScorerKind::Reference;
    throw Error(ErrorCode::InvalidArgument, "unknown scorer '" + std::string(s) + "'");
}

struct ScorerConfig {
    ScorerKind kind = ScorerKind::Reference;
    std::optional<std::filesystem::path> table_path;
};

/// Resolved scoring function: either a precomputed table or the reference scorer.
class Scorer {
public:
    static Scorer reference() { return Scorer{}; }

    static Scorer from_table(ScoreTable table) {
        Scorer s;
        s.table_ = std::move(table);
        return s;
    }

    static Scorer from_config(const ScorerConfig& cfg) {
        if (cfg.kind == ScorerKind::Reference) return reference();
        if (!cfg.table_path) throw Error(ErrorCode::InvalidArgument, "table scorer requires a score table path");
        return from_table(load_score_table(*cfg.table_path));
    }

    ScorerKind kind() const noexcept { return table_ ? ScorerKind::Table : ScorerKind::Reference; }

    QualityScore score(const DocumentRecord& rec) const {
        if (table_) {
            auto q = table_->find(rec.doc_id);
            if (!q) throw Error(ErrorCode::MissingScore, "no score for '" + rec.doc_id + "'");
            return *q;
        }
        try {
            return score_text_reference(rec.text);
        } catch (const Error& e) {
            throw Error(e.code(), "doc '" + rec.doc_id + "': text has no tokens");
        }
    }

private:
    std::optional<ScoreTable> table_;
};

/// Scores records possibly in parallel; output order always equals input order.
/// On failure the error for the earliest failing record is raised.
inline std::vector<std::pair<DocId, QualityScore>> score_batch(const Scorer& scorer,
                                                               std::span<const DocumentRecord> records) {
    std::vector<std::pair<DocId, QualityScore>> out(records.size());
    detail::parallel_for(records.size(), [&](std::size_t i) {
        out[i] = {records[i].doc_id, scorer.score(records[i])};
    });
    return out;
}

inline ScoreTable score_corpus(const Scorer& scorer, const Corpus& corpus) {
    ScoreTable t;
    for (auto& [id, q] : score_batch(scorer, corpus.records())) t.insert(id, q);
    return t;
}

/// Mean score over the (deduplicated) successors of `doc_id`. Values are
/// summed in sorted order so the result does not depend on link order.
inline QualityScore mean_outlink_quality(const WebGraph& graph, const ScoreTable& scores, std::string_view doc_id) {
    auto succ = graph.successors(graph.index_of(doc_id));
    if (succ.empty()) throw Error(ErrorCode::NoOutlinks, "'" + std::string(doc_id) + "' has no outlinks");
    std::vector<double> qs;
    qs.reserve(succ.size());
    for (auto s : succ) qs.push_back(scores.at(graph.id(s)));
    std::sort(qs.begin(), qs.end());
    double sum = 0.0;
    for (double q : qs) sum += q;
    return sum / static_cast<double>(qs.size());
}

} // namespace qcrawl
