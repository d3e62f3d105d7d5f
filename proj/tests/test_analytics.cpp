#include "qcrawl/analytics.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qcrawl;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::Io;
}

Histogram hist(std::vector<std::uint64_t> counts) {
    Histogram h;
    for (std::size_t i = 0; i <= counts.size(); ++i) h.edges.push_back(static_cast<double>(i));
    h.counts = std::move(counts);
    return h;
}

std::vector<oracle::HexAssignment> assignments(const std::vector<Point>& pts, std::size_t g) {
    HexLayout layout(pts, g);
    std::vector<oracle::HexAssignment> out;
    for (const auto& p : pts) {
        auto k = layout.assign(p);
        out.push_back({static_cast<int>(k.lattice), static_cast<long>(k.i), static_cast<long>(k.j)});
    }
    return out;
}

std::vector<std::pair<double, double>> pairs_of(const std::vector<Point>& pts) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pts) out.emplace_back(p.x, p.y);
    return out;
}

} // namespace

TEST(Histogram, Examples) {
    std::vector<double> v{0.0, 1.0};
    auto h = histogram(v, 2);
    EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 1}));
    EXPECT_EQ(h.edges, (std::vector<double>{0.0, 0.5, 1.0}));

    std::vector<double> w{0.0, 0.25, 0.5, 0.75, 1.0};
    EXPECT_EQ(histogram(w, 2).counts, (std::vector<std::uint64_t>{2, 3}));

    std::vector<double> same{3.0, 3.0};
    EXPECT_EQ(code_of([&] { histogram(same, 4); }), ErrorCode::ZeroWidth);
    EXPECT_EQ(histogram(same, 2, Range{2.0, 4.0}).counts, (std::vector<std::uint64_t>{0, 2}));
    EXPECT_THROW(histogram(v, 0), Error);
}

TEST(Histogram, CountsConserveAndSharedRangeCoversAll) {
    std::mt19937 rng(1);
    std::normal_distribution<double> nd(-3.0, 1.0);
    std::vector<std::vector<double>> series(3);
    for (auto& s : series)
        for (int i = 0; i < 500; ++i) s.push_back(nd(rng));
    auto r = shared_range(series);
    for (const auto& s : series) {
        auto h = histogram(s, 15, r);
        EXPECT_EQ(h.total(), s.size());
        EXPECT_EQ(h.edges.front(), r.lo);
        EXPECT_EQ(h.edges.back(), r.hi);
    }
}

TEST(JsDistance, Examples) {
    EXPECT_EQ(js_distance(hist({3, 5, 2}), hist({3, 5, 2})), 0.0);
    EXPECT_EQ(js_distance(hist({3, 5, 2}), hist({6, 10, 4})), 0.0);
    EXPECT_NEAR(js_distance(hist({1, 0}), hist({0, 1})), 1.0, 1e-12);
    // JSD = 1.5 - 0.75 log2 3, distance is its square root
    double hand = std::sqrt(1.5 - 0.75 * std::log2(3.0));
    EXPECT_NEAR(js_distance(hist({1, 1}), hist({1, 0})), hand, 1e-12);
    double kl_pm = 0.5 * std::log2(0.5 / 0.75) + 0.5 * std::log2(0.5 / 0.25);
    double kl_qm = std::log2(1.0 / 0.75);
    EXPECT_NEAR(js_distance(hist({1, 1}), hist({1, 0})), std::sqrt(0.5 * kl_pm + 0.5 * kl_qm), 1e-12);
    EXPECT_NEAR(js_distance(hist({1, 1}), hist({1, 0})), 0.5579230, 1e-6);
}

TEST(JsDistance, Errors) {
    EXPECT_EQ(code_of([] { js_distance(hist({1, 1}), hist({1, 1, 1})); }), ErrorCode::EdgeMismatch);
    EXPECT_EQ(code_of([] { js_distance(hist({0, 0}), hist({1, 1})); }), ErrorCode::EmptyHistogram);
}

TEST(JsDistance, SymmetricAndBounded) {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> a(6), b(6);
        for (auto& v : a) v = rng() % 5;
        for (auto& v : b) v = rng() % 5;
        a[0] += 1;
        b[5] += 1;
        double d = js_distance(hist(a), hist(b));
        EXPECT_EQ(d, js_distance(hist(b), hist(a)));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
    }
}

TEST(Undersample, Examples) {
    std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    auto [x, y] = undersample(a, b, 7);
    EXPECT_EQ(x, a);
    EXPECT_EQ(y, b);

    std::vector<double> big{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, small{10, 11, 12};
    auto [p, q] = undersample(big, small, 7);
    EXPECT_EQ(p.size(), 3u);
    EXPECT_EQ(q, small);
    for (double v : p) EXPECT_NE(std::find(big.begin(), big.end(), v), big.end());
    EXPECT_TRUE(std::is_sorted(p.begin(), p.end())); // original order kept
    EXPECT_EQ(std::set<double>(p.begin(), p.end()).size(), 3u);
    auto again = undersample(big, small, 7);
    EXPECT_EQ(again.first, p);
    auto [r, s] = undersample(small, big, 7);
    EXPECT_EQ(r, small);
    EXPECT_EQ(s, p);
}

TEST(Pearson, Examples) {
    std::vector<double> x{0, 1, 2}, up{1, 3, 5}, down{5, 3, 1}, flat{2, 2, 2};
    EXPECT_NEAR(pearson(x, up), 1.0, 1e-12);
    EXPECT_NEAR(pearson(x, down), -1.0, 1e-12);
    EXPECT_EQ(code_of([&] { pearson(x, flat); }), ErrorCode::UndefinedCorrelation);
    std::vector<double> one{1};
    EXPECT_THROW(pearson(one, one), Error);
    std::vector<double> shorter{1, 2};
    EXPECT_EQ(code_of([&] { pearson(x, shorter); }), ErrorCode::LengthMismatch);
}

TEST(Ols, Examples) {
    std::vector<double> x{0, 1, 2}, y{0, 1, 3};
    auto f = ols_regression(x, y);
    EXPECT_NEAR(f.slope, 1.5, 1e-12);
    EXPECT_NEAR(f.intercept, -1.0 / 6.0, 1e-12);
    std::vector<double> line{1, 3, 5};
    auto g = ols_regression(x, line);
    EXPECT_NEAR(g.slope, 2.0, 1e-12);
    EXPECT_NEAR(g.intercept, 1.0, 1e-12);
}

TEST(PearsonProperty, AffineInvarianceAndSlopeSign) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> xs(20), ys(20);
        for (auto& v : xs) v = u(rng);
        for (auto& v : ys) v = u(rng);
        double r = pearson(xs, ys);
        double a = u(rng), c = u(rng);
        double b = 0.1 + std::fabs(u(rng)), d = 0.1 + std::fabs(u(rng));
        auto xs2 = xs, ys2 = ys;
        for (auto& v : xs2) v = a + b * v;
        for (auto& v : ys2) v = c + d * v;
        EXPECT_NEAR(pearson(xs2, ys2), r, 1e-9);
        for (auto& v : ys2) v = -v;
        EXPECT_NEAR(pearson(xs2, ys2), -r, 1e-9);
        EXPECT_LE(std::fabs(r), 1.0);
        auto f = ols_regression(xs, ys);
        if (r != 0.0) {
            EXPECT_EQ(f.slope > 0, r > 0);
        }
    }
}

TEST(Hexbin, Examples) {
    std::vector<Point> one{{0.3, -2.0}};
    auto g = hexbin(one, 25, 1);
    ASSERT_EQ(g.cells.size(), 1u);
    EXPECT_EQ(g.cells[0].count, 1u);
    EXPECT_EQ(g.cells[0].center_x, 0.3);
    EXPECT_EQ(g.cells[0].center_y, -2.0);

    std::vector<Point> corners{{0, 0}, {1, 1}};
    auto h = hexbin(corners, 25, 2);
    EXPECT_TRUE(h.cells.empty());
    EXPECT_EQ(h.filtered_points, 2u);
    auto k = hexbin(corners, 25, 1);
    ASSERT_EQ(k.cells.size(), 2u);
    EXPECT_EQ(k.cells[0].center_x, 0.0);
    EXPECT_EQ(k.cells[0].center_y, 0.0);
    EXPECT_EQ(k.kept_points, 2u);

    std::vector<Point> flat{{0, 1}, {2, 1}};
    EXPECT_EQ(code_of([&] { hexbin(flat, 25, 1); }), ErrorCode::DegenerateBounds);
    EXPECT_THROW(hexbin(corners, 0, 1), Error);
    EXPECT_THROW(hexbin(std::vector<Point>{}, 25, 1), Error);
}

TEST(Hexbin, ClusteredPointsMatchBruteForce) {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> nd(0.0, 0.05);
    std::vector<Point> pts;
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < 25; ++i) pts.push_back({c + nd(rng), -c + nd(rng)});
    EXPECT_EQ(assignments(pts, 25), oracle::hexbin_brute_force(pairs_of(pts), 25));
}

TEST(Hexbin, CountsMatchBruteForceAndConserve) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t g : {1u, 2u, 7u, 25u}) {
        std::vector<Point> pts;
        for (int i = 0; i < 2000; ++i) pts.push_back({u(rng), u(rng) * 3.0});
        // exact lattice coordinates and cell boundaries exercise ties
        pts.push_back({-1.0, -3.0});
        pts.push_back({1.0, 3.0});
        EXPECT_EQ(assignments(pts, g), oracle::hexbin_brute_force(pairs_of(pts), g));
        auto grid = hexbin(pts, g, 5);
        EXPECT_EQ(grid.kept_points + grid.filtered_points, pts.size());
        for (const auto& c : grid.cells) EXPECT_GE(c.count, 5u);
    }
}

TEST(CorrelationStudy, PerfectHomophily) {
    // every page links only to pages of its own quality
    std::vector<DocumentRecord> recs{{"a", std::nullopt, "", {"a2"}}, {"a2", std::nullopt, "", {"a"}},
                                     {"b", std::nullopt, "", {"b2"}}, {"b2", std::nullopt, "", {"b"}},
                                     {"c", std::nullopt, "", {"c2"}}, {"c2", std::nullopt, "", {"c"}}};
    auto l = build_corpus(recs);
    ScoreTable t;
    for (auto [id, q] : std::vector<std::pair<std::string, double>>{
             {"a", -1}, {"a2", -1}, {"b", -2}, {"b2", -2}, {"c", -4}, {"c2", -4}})
        t.insert(id, q);
    auto s = correlation_study(l.graph, t);
    EXPECT_NEAR(s.report.pearson_r, 1.0, 1e-12);
    EXPECT_NEAR(s.report.ols_slope, 1.0, 1e-12);
    EXPECT_EQ(s.report.n, 6u);
}

TEST(CorrelationStudy, ConstantOutlinkMeanIsUndefined) {
    std::vector<DocumentRecord> recs{{"x", std::nullopt, "", {"p", "q"}}, {"y", std::nullopt, "", {"p", "q"}},
                                     {"p", std::nullopt, "", {}}, {"q", std::nullopt, "", {}}};
    auto l = build_corpus(recs);
    ScoreTable t;
    t.insert("x", -1);
    t.insert("y", -2);
    t.insert("p", -1);
    t.insert("q", -3);
    EXPECT_EQ(code_of([&] { correlation_study(l.graph, t); }), ErrorCode::UndefinedCorrelation);
}

TEST(CorrelationStudy, FiveNodeHandOracle) {
    std::vector<DocumentRecord> recs{{"n1", std::nullopt, "", {"n2", "n3"}}, {"n2", std::nullopt, "", {"n1"}},
                                     {"n3", std::nullopt, "", {"n4", "n5"}}, {"n4", std::nullopt, "", {"n5"}},
                                     {"n5", std::nullopt, "", {"n1", "n2", "n4"}}};
    auto l = build_corpus(recs);
    ScoreTable t;
    t.insert("n1", -0.5);
    t.insert("n2", -1.0);
    t.insert("n3", -2.0);
    t.insert("n4", -3.0);
    t.insert("n5", -0.25);
    auto s = correlation_study(l.graph, t);
    // q_hat: n1 -> -1.5, n2 -> -0.5, n3 -> -1.625, n4 -> -0.25, n5 -> -1.5
    double xs[5] = {-0.5, -1.0, -2.0, -3.0, -0.25};
    double ys[5] = {-1.5, -0.5, -1.625, -0.25, -1.5};
    double mx = 0, my = 0;
    for (int i = 0; i < 5; ++i) mx += xs[i] / 5, my += ys[i] / 5;
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 5; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    EXPECT_NEAR(s.report.pearson_r, sxy / std::sqrt(sxx * syy), 1e-12);
    EXPECT_NEAR(s.report.ols_slope, sxy / sxx, 1e-12);
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(s.points[i].y, ys[i]);
}

TEST(CorrelationStudy, NeedsTwoPagesWithOutlinks) {
    std::vector<DocumentRecord> recs{{"a", std::nullopt, "", {"b"}}, {"b", std::nullopt, "", {}}};
    auto l = build_corpus(recs);
    ScoreTable t;
    t.insert("a", 0);
    t.insert("b", -1);
    EXPECT_THROW(correlation_study(l.graph, t), Error);
}

TEST(RelevanceSplit, PartitionsTheTable) {
    ScoreTable t;
    t.insert("a", -1);
    t.insert("b", -2);
    t.insert("c", -3);
    auto none = split_by_relevance(t, Qrels{});
    EXPECT_TRUE(none.relevant.empty());
    EXPECT_EQ(none.irrelevant.size(), 3u);
    auto qr = parse_qrels("q1 0 a 1\nq2 0 a 2\nq1 0 b 0\nq3 0 zz 1\n");
    auto s = split_by_relevance(t, qr);
    EXPECT_EQ(s.relevant, (std::vector<double>{-1}));
    EXPECT_EQ(s.irrelevant, (std::vector<double>{-2, -3}));
    EXPECT_EQ(s.relevant.size() + s.irrelevant.size(), t.size());
}

TEST(FiveNumberSummary, LinearInterpolation) {
    std::vector<double> v{5, 1, 3, 2, 4};
    auto s = five_number_summary(v);
    EXPECT_EQ(s.min, 1);
    EXPECT_EQ(s.q1, 2);
    EXPECT_EQ(s.median, 3);
    EXPECT_EQ(s.q3, 4);
    EXPECT_EQ(s.max, 5);
    std::vector<double> w{1, 2};
    EXPECT_DOUBLE_EQ(five_number_summary(w).median, 1.5);
}
