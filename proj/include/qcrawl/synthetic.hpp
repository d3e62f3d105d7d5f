#pragma once

// Synthetic crawl worlds for experiments and tests. Page quality is planted
// through text repetition so the reference scorer recovers it exactly:
// a page with `distinct` different tokens out of `tokens_per_doc` scores
// ln(distinct / tokens_per_doc). Relevant pages get the top score (0).

#include "qcrawl/corpus_graph.hpp"
#include "qcrawl/detail/io.hpp"
#include "qcrawl/retrieval.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

namespace qcrawl {

enum class LinkBias { Homophilic, AntiHomophilic };

struct SyntheticConfig {
    std::size_t nodes = 2000;
    std::size_t queries = 100;
    std::size_t relevant_per_query = 2;
    std::size_t distractors_per_query = 3; // low-quality pages sharing the query term
    std::size_t tokens_per_doc = 30;
    std::size_t out_degree = 6;
    std::size_t rank_window = 40;   // links go to pages within this many quality ranks
    double random_link_prob = 0.1;  // otherwise a uniformly random target
    std::size_t seeds = 100;
    LinkBias bias = LinkBias::Homophilic;
    std::uint64_t rng_seed = 42;
};

struct SyntheticWorld {
    std::vector<DocumentRecord> records;
    std::vector<DocId> seeds;
    std::vector<Query> queries;
    Qrels qrels;
    std::vector<std::size_t> distinct_tokens; // per record: planted quality level
};

namespace detail {

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline std::string node_name(std::size_t i) {
    auto s = std::to_string(i);
    return "p" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

} // namespace detail

inline SyntheticWorld make_synthetic_world(const SyntheticConfig& cfg) {
    const std::size_t n = cfg.nodes;
    const std::size_t planted = cfg.queries * cfg.relevant_per_query;
    if (n < 2 || planted + cfg.queries * cfg.distractors_per_query > n || cfg.tokens_per_doc < 2 || cfg.seeds == 0 ||
        cfg.seeds > n)
        throw Error(ErrorCode::InvalidArgument, "synthetic configuration does not fit the node count");

    std::mt19937_64 rng(cfg.rng_seed);
    SyntheticWorld w;

    // Random placement of roles over node ids.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[detail::uniform_index(rng, i + 1)]);

    const std::size_t t = cfg.tokens_per_doc;
    std::vector<std::size_t> distinct(n);
    std::vector<long> topic(n, -1);
    for (std::size_t r = 0; r < n; ++r) {
        auto node = perm[r];
        if (r < planted) {
            distinct[node] = t;
            topic[node] = static_cast<long>(r / cfg.relevant_per_query);
        } else {
            distinct[node] = 1 + detail::uniform_index(rng, t - 1); // 1 .. t-1
            std::size_t d = r - planted;
            if (d < cfg.queries * cfg.distractors_per_query) {
                topic[node] = static_cast<long>(d / cfg.distractors_per_query);
                distinct[node] = 1 + detail::uniform_index(rng, std::max<std::size_t>(1, t / 3));
            }
        }
    }

    w.records.resize(n);
    w.distinct_tokens = distinct;
    for (std::size_t i = 0; i < n; ++i) {
        auto& rec = w.records[i];
        rec.doc_id = detail::node_name(i);
        rec.url = "https://synthetic.example/" + rec.doc_id;
        std::vector<std::string> words;
        if (topic[i] >= 0) words.push_back("topic" + std::to_string(topic[i]));
        for (std::size_t k = words.size(); k < distinct[i]; ++k)
            words.push_back("w" + std::to_string(i) + "x" + std::to_string(k));
        const std::size_t unique = words.size();
        for (std::size_t k = unique; k < t; ++k) words.push_back(words[k % unique]);
        for (std::size_t k = 0; k < words.size(); ++k) {
            if (k) rec.text.push_back(' ');
            rec.text += words[k];
        }
    }

    // Quality rank: order by planted level, random tie-break.
    std::vector<std::size_t> by_quality(n);
    std::iota(by_quality.begin(), by_quality.end(), std::size_t{0});
    std::vector<std::uint64_t> jitter(n);
    for (auto& j : jitter) j = rng();
    std::sort(by_quality.begin(), by_quality.end(), [&](std::size_t a, std::size_t b) {
        if (distinct[a] != distinct[b]) return distinct[a] > distinct[b];
        return jitter[a] < jitter[b];
    });
    std::vector<std::size_t> rank_of(n);
    for (std::size_t r = 0; r < n; ++r) rank_of[by_quality[r]] = r;

    const std::size_t win = std::max<std::size_t>(1, std::min(cfg.rank_window, n - 1));
    auto near_rank = [&](std::size_t centre) {
        std::size_t lo = centre >= win ? centre - win : 0;
        std::size_t hi = std::min(n - 1, centre + win);
        return by_quality[lo + detail::uniform_index(rng, hi - lo + 1)];
    };
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::unordered_set<std::size_t> chosen;
        std::size_t centre = cfg.bias == LinkBias::Homophilic ? rank_of[i] : n - 1 - rank_of[i];
        for (std::size_t attempt = 0; chosen.size() < cfg.out_degree && attempt < 8 * cfg.out_degree; ++attempt) {
            std::size_t target = coin(rng) < cfg.random_link_prob ? detail::uniform_index(rng, n) : near_rank(centre);
            if (target == i || !chosen.insert(target).second) continue;
            w.records[i].outlinks.push_back(w.records[target].doc_id);
            ++indegree[target];
        }
    }
    // Every page gets at least one in-link.
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] > 0) continue;
        std::size_t centre = cfg.bias == LinkBias::Homophilic ? rank_of[i] : n - 1 - rank_of[i];
        std::size_t src = near_rank(centre);
        if (src == i) src = by_quality[(rank_of[i] + 1) % n];
        w.records[src].outlinks.push_back(w.records[i].doc_id);
        ++indegree[i];
    }

    std::vector<std::size_t> seed_pick(n);
    std::iota(seed_pick.begin(), seed_pick.end(), std::size_t{0});
    for (std::size_t i = 0; i < cfg.seeds; ++i) std::swap(seed_pick[i], seed_pick[i + detail::uniform_index(rng, n - i)]);
    for (std::size_t i = 0; i < cfg.seeds; ++i) w.seeds.push_back(w.records[seed_pick[i]].doc_id);

    for (std::size_t q = 0; q < cfg.queries; ++q) w.queries.push_back({"q" + std::to_string(q), "topic" + std::to_string(q)});
    for (std::size_t i = 0; i < n; ++i)
        if (topic[i] >= 0 && distinct[i] == t)
            w.qrels.add("q" + std::to_string(topic[i]), w.records[i].doc_id, 1);
    return w;
}

/// Writes corpus.jsonl, seeds.txt, queries.tsv and qrels.txt into `dir`.
inline void write_synthetic_world(const SyntheticWorld& w, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<RecordRow> rows;
    for (const auto& r : w.records) {
        ordered_json j;
        j["doc_id"] = r.doc_id;
        j["url"] = r.url ? ordered_json(*r.url) : ordered_json(nullptr);
        j["text"] = r.text;
        j["outlinks"] = r.outlinks;
        rows.push_back({std::move(j), 0});
    }
    write_rows(rows, dir / "corpus.jsonl", RecordFormat::Jsonl);
    std::string seeds;
    for (const auto& s : w.seeds) seeds += s + '\n';
    detail::write_file(dir / "seeds.txt", seeds);
    std::string queries;
    for (const auto& q : w.queries) queries += q.id + '\t' + q.text + '\n';
    detail::write_file(dir / "queries.tsv", queries);
    std::string qrels;
    for (const auto& q : w.queries)
        for (const auto& d : w.qrels.relevant(q.id)) qrels += q.id + " 0 " + d + " 1\n";
    detail::write_file(dir / "qrels.txt", qrels);
}

} // namespace qcrawl
