#pragma once

#include "qcrawl/corpus_graph.hpp"
#include "qcrawl/detail/io.hpp"
#include "qcrawl/detail/text.hpp"
#include "qcrawl/error.hpp"
#include "qcrawl/tokenize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qcrawl {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::uint32_t doc = 0; // index into InvertedIndex::doc_ids()
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

class InvertedIndex {
public:
    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avgdl() const noexcept { return avgdl_; }
    const std::vector<DocId>& doc_ids() const noexcept { return doc_ids_; }
    const std::vector<std::uint32_t>& doc_lengths() const noexcept { return doc_lengths_; }
    std::size_t term_count() const noexcept { return postings_.size(); }

    std::size_t posting_count() const noexcept {
        std::size_t n = 0;
        for (const auto& [t, p] : postings_) n += p.size();
        return n;
    }

    std::span<const Posting> postings(std::string_view term) const {
        auto it = postings_.find(std::string(term));
        if (it == postings_.end()) return {};
        return it->second;
    }

    std::optional<std::uint32_t> doc_index(std::string_view id) const {
        auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), id);
        if (it == doc_ids_.end() || *it != id) return std::nullopt;
        return static_cast<std::uint32_t>(it - doc_ids_.begin());
    }

    /// ln(1 + (N - df + 0.5) / (df + 0.5)); always > 0 for indexed terms.
    double idf(std::string_view term) const {
        double df = static_cast<double>(postings(term).size());
        double n = static_cast<double>(doc_count());
        return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }

    const Bm25Params& params() const noexcept { return params_; }

    friend bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
        return a.doc_ids_ == b.doc_ids_ && a.doc_lengths_ == b.doc_lengths_ && a.avgdl_ == b.avgdl_ &&
               a.postings_ == b.postings_;
    }

    template <class Range>
    friend InvertedIndex build_index(const Corpus& corpus, const Range& ids, Bm25Params params);

private:
    std::vector<DocId> doc_ids_; // sorted
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::vector<Posting>> postings_; // postings sorted by doc
    double avgdl_ = 0.0;
    Bm25Params params_;
};

/// Indexes exactly `ids` (any range of doc ids; repeats are ignored).
/// Documents without tokens count toward N with length 0; an index whose
/// documents are all empty simply matches nothing.
template <class Range>
InvertedIndex build_index(const Corpus& corpus, const Range& ids, Bm25Params params) {
    InvertedIndex idx;
    idx.params_ = params;
    std::set<DocId> sorted(std::begin(ids), std::end(ids));
    if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "cannot index an empty document set");
    idx.doc_ids_.assign(sorted.begin(), sorted.end());
    idx.doc_lengths_.resize(idx.doc_ids_.size());
    std::uint64_t total = 0;
    for (std::uint32_t d = 0; d < idx.doc_ids_.size(); ++d) {
        auto terms = tokenize(corpus.at(idx.doc_ids_[d]).text);
        idx.doc_lengths_[d] = static_cast<std::uint32_t>(terms.size());
        total += terms.size();
        std::map<std::string, std::uint32_t> tf;
        for (auto& t : terms) ++tf[t];
        for (auto& [t, c] : tf) idx.postings_[t].push_back({d, c});
    }
    idx.avgdl_ = static_cast<double>(total) / static_cast<double>(idx.doc_ids_.size());
    return idx;
}

template <class Range>
InvertedIndex build_index(const Corpus& corpus, const Range& ids) {
    return build_index(corpus, ids, Bm25Params{});
}

namespace detail {

inline std::vector<std::string> distinct_sorted(std::span<const std::string> terms) {
    std::vector<std::string> t(terms.begin(), terms.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

inline double bm25_term(const InvertedIndex& idx, double idf, std::uint32_t tf, std::uint32_t dl) {
    const auto& p = idx.params();
    double ftf = static_cast<double>(tf);
    double norm = p.k1 * (1.0 - p.b + p.b * static_cast<double>(dl) / idx.avgdl());
    return idf * ftf * (p.k1 + 1.0) / (ftf + norm);
}

} // namespace detail

/// BM25 of one document; repeated query terms count once.
inline double bm25_score(const InvertedIndex& idx, std::span<const std::string> query_terms, std::string_view doc_id) {
    auto d = idx.doc_index(doc_id);
    if (!d) throw Error(ErrorCode::UnknownDoc, "'" + std::string(doc_id) + "' is not indexed");
    double score = 0.0;
    for (const auto& t : detail::distinct_sorted(query_terms)) {
        auto plist = idx.postings(t);
        auto it = std::lower_bound(plist.begin(), plist.end(), *d,
                                   [](const Posting& p, std::uint32_t doc) { return p.doc < doc; });
        if (it == plist.end() || it->doc != *d) continue;
        score += detail::bm25_term(idx, idx.idf(t), it->tf, idx.doc_lengths()[*d]);
    }
    return score;
}

struct ScoredDoc {
    DocId doc_id;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Documents with positive score, best first, ties by doc_id, at most k.
/// Per-document sums accumulate in the same term order as bm25_score.
inline std::vector<ScoredDoc> search_topk(const InvertedIndex& idx, std::span<const std::string> query_terms,
                                          std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
    std::vector<double> acc(idx.doc_count(), 0.0);
    std::vector<std::uint32_t> touched;
    for (const auto& t : detail::distinct_sorted(query_terms)) {
        auto plist = idx.postings(t);
        if (plist.empty()) continue;
        double idf = idx.idf(t);
        for (const auto& p : plist) {
            if (acc[p.doc] == 0.0) touched.push_back(p.doc);
            acc[p.doc] += detail::bm25_term(idx, idf, p.tf, idx.doc_lengths()[p.doc]);
        }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    std::vector<ScoredDoc> hits;
    for (auto d : touched)
        if (acc[d] > 0.0) hits.push_back({idx.doc_ids()[d], acc[d]});
    auto better = [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    };
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), better);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }
    return hits;
}

using QueryId = std::string;

struct Query {
    QueryId id;
    std::string text;
};

/// `query_id<TAB>text` per line.
inline std::vector<Query> parse_queries(std::string_view data) {
    std::vector<Query> out;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    for (auto line : detail::split(data, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (detail::trim(line).empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0)
            throw Error(ErrorCode::Parse, "queries line " + std::to_string(line_no) + ": expected query_id<TAB>text");
        std::string id(line.substr(0, tab));
        if (!seen.insert(id).second)
            throw Error(ErrorCode::Parse, "queries line " + std::to_string(line_no) + ": duplicate query '" + id + "'");
        out.push_back({std::move(id), std::string(line.substr(tab + 1))});
    }
    return out;
}

inline std::vector<Query> load_queries(const std::filesystem::path& path) {
    return parse_queries(detail::read_file(path));
}

/// Relevance judgments; a document is relevant to a query when its grade is >= 1.
class Qrels {
public:
    void add(const QueryId& q, const DocId& d, int grade) {
        if (grade < 0) throw Error(ErrorCode::Parse, "negative grade for (" + q + ", " + d + ")");
        if (!grades_.emplace(std::make_pair(q, d), grade).second)
            throw Error(ErrorCode::Parse, "duplicate judgment for (" + q + ", " + d + ")");
        if (grade >= 1) relevant_[q].insert(d);
    }

    std::size_t size() const noexcept { return grades_.size(); }
    bool empty() const noexcept { return grades_.empty(); }

    std::optional<int> grade(const QueryId& q, const DocId& d) const {
        auto it = grades_.find({q, d});
        if (it == grades_.end()) return std::nullopt;
        return it->second;
    }

    const std::set<DocId>& relevant(const QueryId& q) const {
        static const std::set<DocId> none;
        auto it = relevant_.find(q);
        return it == relevant_.end() ? none : it->second;
    }

    /// Every doc with grade >= 1 for at least one query.
    std::set<DocId> all_relevant() const {
        std::set<DocId> out;
        for (const auto& [q, docs] : relevant_) out.insert(docs.begin(), docs.end());
        return out;
    }

private:
    std::map<std::pair<QueryId, DocId>, int> grades_;
    std::map<QueryId, std::set<DocId>> relevant_;
};

/// TREC layout: `query_id iteration doc_id grade`, whitespace separated.
inline Qrels parse_qrels(std::string_view data) {
    Qrels qrels;
    std::size_t line_no = 0;
    for (auto line : detail::split(data, '\n')) {
        ++line_no;
        auto cols = detail::split_ws(line);
        if (cols.empty()) continue;
        auto where = "qrels line " + std::to_string(line_no) + ": ";
        if (cols.size() != 4) throw Error(ErrorCode::Parse, where + "expected 'query_id 0 doc_id grade'");
        auto g = detail::parse_int<int>(cols[3]);
        if (!g) throw Error(ErrorCode::Parse, where + "bad grade '" + std::string(cols[3]) + "'");
        try {
            qrels.add(std::string(cols[0]), std::string(cols[2]), *g);
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, where + e.what());
        }
    }
    return qrels;
}

inline Qrels load_qrels(const std::filesystem::path& path) { return parse_qrels(detail::read_file(path)); }

/// Fraction of the query's relevant documents found in the first k results.
/// The denominator counts every judged-relevant document, retrieved or not.
/// Returns nullopt when the query has no relevant documents (skip it).
inline std::optional<double> recall_at_k(std::span<const ScoredDoc> ranked, const Qrels& qrels, const QueryId& query,
                                         std::size_t k) {
    const auto& rel = qrels.relevant(query);
    if (rel.empty()) return std::nullopt;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i)
        if (rel.count(ranked[i].doc_id)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(rel.size());
}

} // namespace qcrawl
