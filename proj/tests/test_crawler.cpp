#include "qcrawl/crawler.hpp"

#include "support/oracles.hpp"
#include "support/random_graphs.hpp"
#include "support/temp_dir.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qcrawl;
using testing_support::random_world;

namespace {

LoadedCorpus graph_of(const oracle::Adjacency& adj) {
    std::vector<DocumentRecord> recs;
    for (const auto& [id, out] : adj) recs.push_back({id, std::nullopt, "", out});
    return build_corpus(recs);
}

std::vector<DocId> ids_of(const CrawlTrace& t) {
    std::vector<DocId> out;
    for (const auto& e : t.entries) out.push_back(e.doc_id);
    return out;
}

CrawlTrace crawl(const WebGraph& g, std::vector<DocId> seeds, Strategy s, const ScoreTable* scores = nullptr,
                 std::size_t budget = 1000, std::size_t interval = 1000) {
    return run_crawl(g, seeds, s, scores, {budget, interval});
}

ScoreTable table_of(const std::map<std::string, double>& m) {
    ScoreTable t;
    for (const auto& [id, q] : m) t.insert(id, q);
    return t;
}

} // namespace

TEST(Crawler, BfsLineGraph) {
    auto l = graph_of({{"a", {"b"}}, {"b", {"c"}}, {"c", {}}});
    auto t = crawl(l.graph, {"a"}, Strategy::Bfs);
    EXPECT_EQ(ids_of(t), (std::vector<DocId>{"a", "b", "c"}));
    EXPECT_FALSE(t.entries[0].priority.has_value());
    EXPECT_EQ(t.entries[2].rank, 3u);
}

TEST(Crawler, DfsFollowsFirstLinkFirst) {
    auto l = graph_of({{"a", {"b", "c"}}, {"b", {}}, {"c", {"d"}}, {"d", {}}});
    EXPECT_EQ(ids_of(crawl(l.graph, {"a"}, Strategy::Dfs)), (std::vector<DocId>{"a", "b", "c", "d"}));
    EXPECT_EQ(ids_of(crawl(l.graph, {"a"}, Strategy::Bfs)), (std::vector<DocId>{"a", "b", "c", "d"}));
}

TEST(Crawler, DfsDiffersFromBfsOnDeepGraph) {
    auto l = graph_of({{"a", {"b", "c"}}, {"b", {"d"}}, {"c", {}}, {"d", {}}});
    EXPECT_EQ(ids_of(crawl(l.graph, {"a"}, Strategy::Dfs)), (std::vector<DocId>{"a", "b", "d", "c"}));
    EXPECT_EQ(ids_of(crawl(l.graph, {"a"}, Strategy::Bfs)), (std::vector<DocId>{"a", "b", "c", "d"}));
}

TEST(Crawler, QOraclePicksBestFrontierPage) {
    auto l = graph_of({{"a", {"b", "c"}}, {"b", {}}, {"c", {}}});
    auto scores = table_of({{"a", -1.0}, {"b", -5.0}, {"c", -2.0}});
    auto t = crawl(l.graph, {"a"}, Strategy::QOracle, &scores);
    EXPECT_EQ(ids_of(t), (std::vector<DocId>{"a", "c", "b"}));
    EXPECT_EQ(t.entries[1].priority, std::optional<double>(-2.0));
}

TEST(Crawler, QOracleTiesBreakByDiscoveryOrder) {
    auto l = graph_of({{"s", {"z", "y"}}, {"y", {}}, {"z", {}}});
    auto scores = table_of({{"s", 0.0}, {"y", -1.0}, {"z", -1.0}});
    EXPECT_EQ(ids_of(crawl(l.graph, {"s"}, Strategy::QOracle, &scores)), (std::vector<DocId>{"s", "z", "y"}));
}

TEST(Crawler, MissingScoreIsReported) {
    auto l = graph_of({{"a", {"b"}}, {"b", {}}});
    auto scores = table_of({{"a", 0.0}});
    try {
        crawl(l.graph, {"a"}, Strategy::QOracle, &scores);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingScore);
        EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
    }
    try {
        crawl(l.graph, {"a"}, Strategy::QOracle, nullptr);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingScore);
    }
}

TEST(Crawler, ArgumentErrors) {
    auto l = graph_of({{"a", {}}});
    auto code = [&](auto fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    EXPECT_EQ(code([&] { crawl(l.graph, {}, Strategy::Bfs); }), ErrorCode::EmptySeeds);
    EXPECT_EQ(code([&] { crawl(l.graph, {"a"}, Strategy::Bfs, nullptr, 0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code([&] { crawl(l.graph, {"a"}, Strategy::Bfs, nullptr, 5, 0); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code([&] { crawl(l.graph, {"nope"}, Strategy::Bfs); }), ErrorCode::UnknownDoc);
    EXPECT_EQ(parse_strategy("qoracle"), Strategy::QOracle);
    EXPECT_THROW(parse_strategy("random"), Error);
}

TEST(Crawler, BudgetLargerThanReachableSetStopsEarly) {
    auto l = graph_of({{"a", {"b"}}, {"b", {}}, {"c", {"a"}}});
    auto t = crawl(l.graph, {"a"}, Strategy::Bfs, nullptr, 10, 4);
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.checkpoint_ranks, (std::vector<std::size_t>{2}));
}

TEST(Crawler, CheckpointRanks) {
    EXPECT_EQ(checkpoint_ranks_for(10, 3), (std::vector<std::size_t>{3, 6, 9, 10}));
    EXPECT_EQ(checkpoint_ranks_for(9, 3), (std::vector<std::size_t>{3, 6, 9}));
    EXPECT_EQ(checkpoint_ranks_for(2, 5), (std::vector<std::size_t>{2}));
    EXPECT_TRUE(checkpoint_ranks_for(0, 5).empty());
}

TEST(Trace, WriteReadWriteIsByteIdentical) {
    auto l = graph_of({{"a", {"b", "c"}}, {"b", {"c"}}, {"c", {"a"}}});
    auto scores = table_of({{"a", -0.1}, {"b", -1.0 / 3.0}, {"c", -2.5e-7}});
    for (auto s : {Strategy::Bfs, Strategy::Dfs, Strategy::QOracle}) {
        auto t = crawl(l.graph, {"a"}, s, &scores, 3, 2);
        auto text = format_trace(t);
        auto back = parse_trace(text);
        EXPECT_EQ(back, t);
        EXPECT_EQ(format_trace(back), text);
    }
    testing_support::TempDir dir;
    auto t = crawl(l.graph, {"a"}, Strategy::QOracle, &scores, 3, 2);
    write_trace(t, dir / "t.tsv");
    EXPECT_EQ(read_trace(dir / "t.tsv"), t);
}

TEST(Trace, ParseRejectsMalformed) {
    EXPECT_THROW(parse_trace("#checkpoints\t1\n2\ta\t-\n"), Error);              // rank gap
    EXPECT_THROW(parse_trace("#checkpoints\t2\n1\ta\t-\n2\ta\t-\n"), Error);     // repeat
    EXPECT_THROW(parse_trace("#checkpoints\t5\n1\ta\t-\n"), Error);              // checkpoint past end
    EXPECT_THROW(parse_trace("1\ta\t-\n"), Error);                               // no header
    EXPECT_THROW(parse_trace("#checkpoints\t1\n1\ta\tabc\n"), Error);            // bad priority
}

TEST(Trace, PrefixBounds) {
    auto l = graph_of({{"a", {"b"}}, {"b", {}}});
    auto t = crawl(l.graph, {"a"}, Strategy::Bfs);
    EXPECT_EQ(trace_prefix(t, 1), (std::set<DocId>{"a"}));
    EXPECT_EQ(trace_prefix(t, 2), (std::set<DocId>{"a", "b"}));
    try {
        trace_prefix(t, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }
    EXPECT_THROW(trace_prefix(t, 0), Error);
}

// Random graphs: each strategy matches its reference simulation, prefixes nest,
// no page repeats, every page is reachable, and the full reachable set is the
// same for all strategies.
TEST(CrawlerProperty, MatchesReferenceSimulations) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        auto w = random_world(rng, 40);
        auto l = graph_of(w.adj);
        auto scores = table_of(w.score);
        std::size_t budget = 1 + rng() % 50;
        std::size_t interval = 1 + rng() % 7;

        auto expect = [&](Strategy s, const std::vector<oracle::Step>& steps) {
            auto t = run_crawl(l.graph, w.seeds, s, &scores, {budget, interval});
            EXPECT_EQ(format_trace(t), oracle::trace_text(steps, interval)) << to_string(s) << " trial " << trial;
        };
        expect(Strategy::Bfs, oracle::bfs_queue(w.adj, w.seeds, budget));
        expect(Strategy::Dfs, oracle::dfs_stack(w.adj, w.seeds, budget));
        expect(Strategy::QOracle, oracle::qoracle_scan(w.adj, w.score, w.seeds, budget));

        std::set<DocId> reach_bfs, reach_dfs, reach_q;
        for (auto [s, out] : {std::pair{Strategy::Bfs, &reach_bfs}, std::pair{Strategy::Dfs, &reach_dfs},
                              std::pair{Strategy::QOracle, &reach_q}}) {
            auto t = run_crawl(l.graph, w.seeds, s, &scores, {1000, 1000});
            std::set<DocId> seen;
            for (std::size_t r = 1; r <= t.size(); ++r) {
                EXPECT_TRUE(seen.insert(t.entries[r - 1].doc_id).second);
                auto p = trace_prefix(t, r);
                EXPECT_EQ(p, seen);
            }
            *out = seen;
        }
        EXPECT_EQ(reach_bfs, reach_dfs);
        EXPECT_EQ(reach_bfs, reach_q);
    }
}

// With every score distinct the crawl is the greedy argmax of the frontier at
// every step, checked directly against the frontier rather than a replay.
TEST(CrawlerProperty, QOracleIsGreedy) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto w = random_world(rng, 60);
        std::uniform_real_distribution<double> u(-5.0, 0.0);
        for (auto& [id, q] : w.score) q = u(rng);
        auto l = graph_of(w.adj);
        auto scores = table_of(w.score);
        auto t = run_crawl(l.graph, w.seeds, Strategy::QOracle, &scores, {1000, 1000});
        std::set<std::string> seen(w.seeds.begin(), w.seeds.end());
        std::set<std::string> frontier = seen;
        for (const auto& e : t.entries) {
            double best = -1e300;
            for (const auto& f : frontier) best = std::max(best, w.score.at(f));
            EXPECT_EQ(w.score.at(e.doc_id), best);
            frontier.erase(e.doc_id);
            for (const auto& y : w.adj.at(e.doc_id))
                if (seen.insert(y).second) frontier.insert(y);
        }
        EXPECT_TRUE(frontier.empty());
    }
}
