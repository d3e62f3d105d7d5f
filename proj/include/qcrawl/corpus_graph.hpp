#pragma once

#include "qcrawl/detail/io.hpp"
#include "qcrawl/detail/text.hpp"
#include "qcrawl/error.hpp"
#include "qcrawl/records.hpp"

#include <cstdint>
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

using DocId = std::string;
using NodeIndex = std::uint32_t;

struct DocumentRecord {
    DocId doc_id;
    std::optional<std::string> url;
    std::string text;
    std::vector<DocId> outlinks;

    friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

/// Documents in file order with an id index. Immutable once built.
class Corpus {
public:
    Corpus() = default;

    /// Validates ids and removes repeated outlinks (first occurrence kept).
    /// `duplicates_dropped` receives the number of removed repeats.
    static Corpus from_records(std::vector<DocumentRecord> records, std::size_t* duplicates_dropped = nullptr) {
        Corpus c;
        std::size_t dups = 0;
        c.docs_ = std::move(records);
        c.index_.reserve(c.docs_.size());
        for (std::size_t i = 0; i < c.docs_.size(); ++i) {
            auto& d = c.docs_[i];
            if (d.doc_id.empty() || detail::has_whitespace(d.doc_id))
                throw Error(ErrorCode::Parse, "invalid doc_id '" + d.doc_id + "'");
            if (!c.index_.emplace(d.doc_id, i).second)
                throw Error(ErrorCode::DuplicateDoc, "duplicate doc_id '" + d.doc_id + "'");
            std::unordered_set<std::string_view> seen;
            std::vector<DocId> kept;
            kept.reserve(d.outlinks.size());
            for (auto& t : d.outlinks) {
                if (seen.insert(t).second) kept.push_back(t);
                else ++dups;
            }
            d.outlinks = std::move(kept);
        }
        if (duplicates_dropped) *duplicates_dropped = dups;
        return c;
    }

    std::size_t size() const noexcept { return docs_.size(); }
    bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }
    const std::vector<DocumentRecord>& records() const noexcept { return docs_; }

    const DocumentRecord& at(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) throw Error(ErrorCode::UnknownDoc, "unknown doc_id '" + std::string(id) + "'");
        return docs_[it->second];
    }

private:
    std::vector<DocumentRecord> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Directed graph over corpus ids. Nodes keep corpus order; successor lists keep
/// outlink order.
class WebGraph {
public:
    WebGraph() = default;

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t edge_count() const noexcept { return edges_; }
    bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

    NodeIndex index_of(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) throw Error(ErrorCode::UnknownDoc, "unknown doc_id '" + std::string(id) + "'");
        return it->second;
    }
    const DocId& id(NodeIndex n) const { return ids_.at(n); }
    const std::vector<DocId>& ids() const noexcept { return ids_; }
    std::span<const NodeIndex> successors(NodeIndex n) const { return adj_.at(n); }

    friend bool operator==(const WebGraph& a, const WebGraph& b) { return a.ids_ == b.ids_ && a.adj_ == b.adj_; }

    class Builder;

private:
    std::vector<DocId> ids_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<std::vector<NodeIndex>> adj_;
    std::size_t edges_ = 0;
};

class WebGraph::Builder {
public:
    NodeIndex add_node(const DocId& id) {
        auto [it, inserted] = g_.index_.emplace(id, static_cast<NodeIndex>(g_.ids_.size()));
        if (!inserted) throw Error(ErrorCode::DuplicateDoc, "duplicate doc_id '" + id + "'");
        g_.ids_.push_back(id);
        g_.adj_.emplace_back();
        seen_.emplace_back();
        return it->second;
    }

    enum class EdgeResult { Kept, Dangling, Duplicate };

    EdgeResult add_edge(std::string_view src, std::string_view dst) {
        auto s = g_.index_.find(std::string(src));
        auto d = g_.index_.find(std::string(dst));
        if (s == g_.index_.end() || d == g_.index_.end()) return EdgeResult::Dangling;
        if (!seen_[s->second].insert(d->second).second) return EdgeResult::Duplicate;
        g_.adj_[s->second].push_back(d->second);
        ++g_.edges_;
        return EdgeResult::Kept;
    }

    WebGraph build() && {
        seen_.clear();
        return std::move(g_);
    }

private:
    WebGraph g_;
    std::vector<std::unordered_set<NodeIndex>> seen_;
};

struct LoadStats {
    std::size_t records = 0;
    std::size_t edges_loaded = 0; // every outlink entry read, before any filtering
    std::size_t edges_kept = 0;
    std::size_t dangling_dropped = 0;
    std::size_t duplicate_dropped = 0;
};

struct Edge {
    DocId src;
    DocId dst;
};

struct LoadedCorpus {
    Corpus corpus;
    WebGraph graph;
    LoadStats stats;
};

/// Builds corpus and graph from records plus optional extra edges. Repeated
/// outlinks are dropped before dangling ones, so an absent target listed twice
/// counts once as dangling and once as duplicate.
inline LoadedCorpus build_corpus(std::vector<DocumentRecord> records, const std::vector<Edge>& extra_edges = {}) {
    LoadedCorpus out;
    for (const auto& r : records) out.stats.edges_loaded += r.outlinks.size();
    out.stats.edges_loaded += extra_edges.size();
    out.corpus = Corpus::from_records(std::move(records), &out.stats.duplicate_dropped);
    out.stats.records = out.corpus.size();

    WebGraph::Builder b;
    for (const auto& r : out.corpus.records()) b.add_node(r.doc_id);
    auto tally = [&](WebGraph::Builder::EdgeResult res) {
        switch (res) {
        case WebGraph::Builder::EdgeResult::Kept: ++out.stats.edges_kept; break;
        case WebGraph::Builder::EdgeResult::Dangling: ++out.stats.dangling_dropped; break;
        case WebGraph::Builder::EdgeResult::Duplicate: ++out.stats.duplicate_dropped; break;
        }
    };
    for (const auto& r : out.corpus.records())
        for (const auto& t : r.outlinks) tally(b.add_edge(r.doc_id, t));
    for (const auto& e : extra_edges) tally(b.add_edge(e.src, e.dst));
    out.graph = std::move(b).build();
    return out;
}

/// Converts one generic row into a DocumentRecord (schema doc_id, url, text, outlinks).
inline DocumentRecord record_from_row(const RecordRow& row) {
    auto fail = [&](const std::string& msg) -> Error {
        return Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": " + msg);
    };
    const auto& f = row.fields;
    DocumentRecord rec;
    if (!f.contains("doc_id") || !f["doc_id"].is_string()) throw fail("missing string field 'doc_id'");
    rec.doc_id = f["doc_id"].get<std::string>();
    if (rec.doc_id.empty() || detail::has_whitespace(rec.doc_id)) throw fail("invalid doc_id '" + rec.doc_id + "'");
    if (f.contains("url") && !f["url"].is_null()) {
        if (!f["url"].is_string()) throw fail("field 'url' must be a string");
        auto u = f["url"].get<std::string>();
        if (!u.empty()) rec.url = std::move(u);
    }
    if (f.contains("text") && !f["text"].is_null()) {
        if (!f["text"].is_string()) throw fail("field 'text' must be a string");
        rec.text = f["text"].get<std::string>();
    }
    if (f.contains("outlinks") && !f["outlinks"].is_null()) {
        if (!f["outlinks"].is_array()) throw fail("field 'outlinks' must be an array");
        for (const auto& o : f["outlinks"]) {
            if (!o.is_string()) throw fail("outlinks must be strings");
            rec.outlinks.push_back(o.get<std::string>());
        }
    }
    return rec;
}

/// Tab-separated `src<TAB>dst`, one edge per line; blank lines and `#` comments skipped.
inline std::vector<Edge> parse_edge_list(std::string_view data) {
    std::vector<Edge> edges;
    std::size_t line_no = 0;
    for (auto line : detail::split(data, '\n')) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto parts = detail::split(t, '\t');
        if (parts.size() != 2 || detail::trim(parts[0]).empty() || detail::trim(parts[1]).empty())
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected src<TAB>dst");
        edges.push_back({std::string(detail::trim(parts[0])), std::string(detail::trim(parts[1]))});
    }
    return edges;
}

inline LoadedCorpus load_corpus(const std::filesystem::path& path, RecordFormat format,
                                const std::optional<std::filesystem::path>& edge_list = std::nullopt) {
    auto data = detail::read_file(path);
    if (format == RecordFormat::Csv) {
        // fixed column order for corpus files
        static const std::vector<std::string> expected{"doc_id", "url", "text", "outlinks"};
        auto header_end = data.find('\n');
        auto header = detail::parse_csv(std::string_view(data).substr(0, header_end));
        if (header.empty() || header.front().fields != expected)
            throw Error(ErrorCode::Parse, "line 1: CSV header must be doc_id,url,text,outlinks");
    }
    auto rows = parse_rows(data, format);
    std::vector<DocumentRecord> records;
    records.reserve(rows.size());
    std::unordered_set<std::string> ids;
    for (const auto& row : rows) {
        auto rec = record_from_row(row);
        if (!ids.insert(rec.doc_id).second)
            throw Error(ErrorCode::DuplicateDoc,
                        "line " + std::to_string(row.line) + ": duplicate doc_id '" + rec.doc_id + "'");
        records.push_back(std::move(rec));
    }
    std::vector<Edge> extra;
    if (edge_list) extra = parse_edge_list(detail::read_file(*edge_list));
    return build_corpus(std::move(records), extra);
}

/// One doc_id per line. Unknown ids are an error; repeats keep the first.
inline std::vector<DocId> parse_seeds(std::string_view data, const WebGraph& graph) {
    std::vector<DocId> seeds;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    for (auto line : detail::split(data, '\n')) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::string id(t);
        if (!graph.contains(id))
            throw Error(ErrorCode::UnknownDoc, "seed line " + std::to_string(line_no) + ": unknown doc_id '" + id + "'");
        if (seen.insert(id).second) seeds.push_back(std::move(id));
    }
    return seeds;
}

inline std::vector<DocId> load_seeds(const std::filesystem::path& path, const WebGraph& graph) {
    return parse_seeds(detail::read_file(path), graph);
}

/// The stored corpus stands in for fetching: id -> text, verbatim.
inline const std::string& oracle_text(const Corpus& corpus, std::string_view doc_id) {
    return corpus.at(doc_id).text;
}

inline std::vector<DocId> outlinks(const WebGraph& graph, std::string_view doc_id) {
    std::vector<DocId> out;
    for (auto s : graph.successors(graph.index_of(doc_id))) out.push_back(graph.id(s));
    return out;
}

} // namespace qcrawl
