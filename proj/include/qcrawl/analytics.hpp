#pragma once

// Distribution and homophily statistics over quality scores: histograms,
// Jensen-Shannon distance, undersampling, Pearson/OLS, hexagonal binning.

#include "qcrawl/corpus_graph.hpp"
#include "qcrawl/error.hpp"
#include "qcrawl/quality.hpp"
#include "qcrawl/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

namespace qcrawl {

struct Histogram {
    std::vector<double> edges; // bins + 1, strictly ascending
    std::vector<std::uint64_t> counts;

    std::size_t bins() const noexcept { return counts.size(); }
    std::uint64_t total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// [min, max] over the union of all series.
inline Range shared_range(std::span<const std::vector<double>> series) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : series)
        for (double v : s) {
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
    if (r.lo > r.hi) throw Error(ErrorCode::InvalidArgument, "no values to span");
    return r;
}

/// Equal-width bins over `range` (default: data min/max). A value lands in
/// floor((v - lo) / width); the top edge belongs to the last bin. Values
/// outside the range are not counted.
inline Histogram histogram(std::span<const double> values, std::size_t bins, std::optional<Range> range = std::nullopt) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "histogram of no values");
    if (bins == 0) throw Error(ErrorCode::InvalidArgument, "bins must be positive");
    for (double v : values)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "histogram values must be finite");
    Range r;
    if (range) {
        r = *range;
        if (!(r.lo < r.hi)) throw Error(ErrorCode::InvalidArgument, "histogram range needs lo < hi");
    } else {
        auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        r = {*mn, *mx};
        if (!(r.lo < r.hi)) throw Error(ErrorCode::ZeroWidth, "all values identical; give an explicit range");
    }
    const double width = (r.hi - r.lo) / static_cast<double>(bins);
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i < bins; ++i) h.edges[i] = r.lo + static_cast<double>(i) * width;
    h.edges[bins] = r.hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        if (v < r.lo || v > r.hi) continue;
        auto idx = v == r.hi ? bins - 1 : static_cast<std::size_t>(std::floor((v - r.lo) / width));
        ++h.counts[std::min(idx, bins - 1)];
    }
    return h;
}

/// sqrt of the base-2 Jensen-Shannon divergence between the normalized
/// counts; lies in [0, 1] and is exactly symmetric in its arguments. Both
/// histograms must share identical edges.
inline double js_distance(const Histogram& h1, const Histogram& h2) {
    if (h1.edges != h2.edges) throw Error(ErrorCode::EdgeMismatch, "histograms have different bin edges");
    const double n1 = static_cast<double>(h1.total());
    const double n2 = static_cast<double>(h2.total());
    if (n1 == 0.0 || n2 == 0.0) throw Error(ErrorCode::EmptyHistogram, "histogram has no counts");
    double jsd = 0.0;
    for (std::size_t i = 0; i < h1.counts.size(); ++i) {
        double p = static_cast<double>(h1.counts[i]) / n1;
        double q = static_cast<double>(h2.counts[i]) / n2;
        double m = 0.5 * (p + q);
        double tp = p > 0.0 ? p * std::log2(p / m) : 0.0;
        double tq = q > 0.0 ? q * std::log2(q / m) : 0.0;
        jsd += 0.5 * (tp + tq);
    }
    return std::clamp(std::sqrt(std::max(jsd, 0.0)), 0.0, 1.0);
}

/// Shrinks the larger list, without replacement, to the smaller list's size.
/// Kept elements stay in their original order; the smaller list is returned
/// as is. Selection uses mt19937_64 seeded with `seed` and a partial
/// Fisher-Yates shuffle of indices.
inline std::pair<std::vector<double>, std::vector<double>> undersample(std::span<const double> a,
                                                                       std::span<const double> b,
                                                                       std::uint64_t seed) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "undersample needs two non-empty lists");
    auto shrink = [seed](std::span<const double> big, std::size_t target) {
        std::vector<std::size_t> idx(big.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < target; ++i) {
            auto j = i + static_cast<std::size_t>(rng() % (big.size() - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(target);
        std::sort(idx.begin(), idx.end());
        std::vector<double> out;
        out.reserve(target);
        for (auto i : idx) out.push_back(big[i]);
        return out;
    };
    std::vector<double> va(a.begin(), a.end()), vb(b.begin(), b.end());
    if (a.size() > b.size()) va = shrink(a, b.size());
    else if (b.size() > a.size()) vb = shrink(b, a.size());
    return {std::move(va), std::move(vb)};
}

namespace detail {

struct Moments {
    double mean_x = 0, mean_y = 0, sxx = 0, syy = 0, sxy = 0;
};

inline Moments centered_moments(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw Error(ErrorCode::LengthMismatch, "series differ in length");
    if (xs.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
    Moments m;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m.mean_x += xs[i];
        m.mean_y += ys[i];
    }
    m.mean_x /= n;
    m.mean_y /= n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - m.mean_x, dy = ys[i] - m.mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

} // namespace detail

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    auto m = detail::centered_moments(xs, ys);
    if (m.sxx == 0.0 || m.syy == 0.0) throw Error(ErrorCode::UndefinedCorrelation, "a series has zero variance");
    return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least squares y = slope * x + intercept.
inline LinearFit ols_regression(std::span<const double> xs, std::span<const double> ys) {
    auto m = detail::centered_moments(xs, ys);
    if (m.sxx == 0.0) throw Error(ErrorCode::UndefinedCorrelation, "x has zero variance");
    LinearFit f;
    f.slope = m.sxy / m.sxx;
    f.intercept = m.mean_y - f.slope * m.mean_x;
    return f;
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// ---------------------------------------------------------------------------
// Hexagonal binning
//
// Points are rescaled over their bounding box to sx in [0, G] and sy in
// [0, G / sqrt(3)] (row units). Cell centers form two lattices: the integer
// lattice (i, j) and the offset lattice (i + 1/2, j + 1/2). Rows are sqrt(3)
// apart relative to columns, so the distance used is dx^2 + 3 dy^2, which is
// plain squared Euclidean distance once rows are laid out at their true pitch
// and the cells become regular hexagons. Ties go to the integer lattice.

enum class HexLattice : std::uint8_t { Integer = 0, Offset = 1 };

struct HexCellKey {
    HexLattice lattice = HexLattice::Integer;
    std::int64_t i = 0;
    std::int64_t j = 0;

    friend auto operator<=>(const HexCellKey&, const HexCellKey&) = default;
};

struct HexCell {
    HexCellKey key;
    double center_x = 0.0; // original coordinates
    double center_y = 0.0;
    std::uint64_t count = 0;
};

struct HexbinGrid {
    std::size_t gridsize = 25;
    std::uint64_t min_count = 1000;
    std::vector<HexCell> cells; // kept cells, ordered by key
    std::uint64_t kept_points = 0;
    std::uint64_t filtered_points = 0;
};

/// Bounding-box transform shared by assignment and center reporting.
class HexLayout {
public:
    HexLayout(std::span<const Point> points, std::size_t gridsize) : g_(static_cast<double>(gridsize)) {
        if (points.empty()) throw Error(ErrorCode::InvalidArgument, "hexbin of no points");
        if (gridsize == 0) throw Error(ErrorCode::InvalidArgument, "gridsize must be positive");
        xmin_ = xmax_ = points.front().x;
        ymin_ = ymax_ = points.front().y;
        for (const auto& p : points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw Error(ErrorCode::InvalidArgument, "hexbin points must be finite");
            xmin_ = std::min(xmin_, p.x);
            xmax_ = std::max(xmax_, p.x);
            ymin_ = std::min(ymin_, p.y);
            ymax_ = std::max(ymax_, p.y);
        }
        bool flat_x = xmax_ == xmin_, flat_y = ymax_ == ymin_;
        single_ = flat_x && flat_y;
        if (!single_ && (flat_x || flat_y))
            throw Error(ErrorCode::DegenerateBounds, "points span zero width or height");
    }

    double gridsize() const noexcept { return g_; }
    double rows() const noexcept { return g_ / std::sqrt(3.0); }
    bool single_location() const noexcept { return single_; }

    double scale_x(double x) const { return single_ ? 0.0 : (x - xmin_) / (xmax_ - xmin_) * g_; }
    double scale_y(double y) const { return single_ ? 0.0 : (y - ymin_) / (ymax_ - ymin_) * rows(); }
    double unscale_x(double sx) const { return single_ ? xmin_ : xmin_ + sx / g_ * (xmax_ - xmin_); }
    double unscale_y(double sy) const { return single_ ? ymin_ : ymin_ + sy / rows() * (ymax_ - ymin_); }

    static double distance2(double sx, double sy, double cx, double cy) {
        double dx = sx - cx, dy = sy - cy;
        return dx * dx + 3.0 * dy * dy;
    }

    /// Nearest center in O(1): nearest point of each lattice, then the closer of the two.
    HexCellKey assign(const Point& p) const {
        double sx = scale_x(p.x), sy = scale_y(p.y);
        double i1 = std::floor(sx + 0.5), j1 = std::floor(sy + 0.5);
        double i2 = std::floor(sx), j2 = std::floor(sy);
        double d1 = distance2(sx, sy, i1, j1);
        double d2 = distance2(sx, sy, i2 + 0.5, j2 + 0.5);
        if (d1 <= d2) return {HexLattice::Integer, static_cast<std::int64_t>(i1), static_cast<std::int64_t>(j1)};
        return {HexLattice::Offset, static_cast<std::int64_t>(i2), static_cast<std::int64_t>(j2)};
    }

    Point center(const HexCellKey& k) const {
        double off = k.lattice == HexLattice::Offset ? 0.5 : 0.0;
        return {unscale_x(static_cast<double>(k.i) + off), unscale_y(static_cast<double>(k.j) + off)};
    }

private:
    double g_;
    double xmin_ = 0, xmax_ = 0, ymin_ = 0, ymax_ = 0;
    bool single_ = false;
};

/// Counts points per hexagonal cell and keeps cells with count >= min_count.
/// When every point sits at the same location they all share one cell
/// centered there.
inline HexbinGrid hexbin(std::span<const Point> points, std::size_t gridsize, std::uint64_t min_count) {
    HexLayout layout(points, gridsize);
    std::map<HexCellKey, std::uint64_t> counts;
    for (const auto& p : points) ++counts[layout.assign(p)];
    HexbinGrid grid;
    grid.gridsize = gridsize;
    grid.min_count = min_count;
    for (const auto& [key, c] : counts) {
        if (c < min_count) {
            grid.filtered_points += c;
            continue;
        }
        auto ctr = layout.center(key);
        grid.cells.push_back({key, ctr.x, ctr.y, c});
        grid.kept_points += c;
    }
    return grid;
}

struct CorrelationReport {
    double pearson_r = 0.0;
    double ols_slope = 0.0;
    double ols_intercept = 0.0;
    std::size_t n = 0;
};

struct CorrelationStudy {
    CorrelationReport report;
    std::vector<DocId> doc_ids;
    std::vector<Point> points; // (q_x, mean outlink quality)
};

/// Page quality vs mean quality of its outlinks, over pages with >= 1 outlink.
inline CorrelationStudy correlation_study(const WebGraph& graph, const ScoreTable& scores) {
    CorrelationStudy study;
    std::vector<double> xs, ys;
    for (NodeIndex n = 0; n < graph.size(); ++n) {
        if (graph.successors(n).empty()) continue;
        const auto& id = graph.id(n);
        double qx = scores.at(id);
        double qhat = mean_outlink_quality(graph, scores, id);
        study.doc_ids.push_back(id);
        study.points.push_back({qx, qhat});
        xs.push_back(qx);
        ys.push_back(qhat);
    }
    if (xs.size() < 2) throw Error(ErrorCode::InvalidArgument, "fewer than two pages with outlinks");
    study.report.n = xs.size();
    study.report.pearson_r = pearson(xs, ys);
    auto fit = ols_regression(xs, ys);
    study.report.ols_slope = fit.slope;
    study.report.ols_intercept = fit.intercept;
    return study;
}

struct RelevanceSplit {
    std::vector<double> relevant;
    std::vector<double> irrelevant;
};

/// Partitions the score table (in table order): relevant means grade >= 1
/// for at least one query.
inline RelevanceSplit split_by_relevance(const ScoreTable& scores, const Qrels& qrels) {
    auto rel = qrels.all_relevant();
    RelevanceSplit out;
    for (const auto& [id, q] : scores.entries()) (rel.count(id) ? out.relevant : out.irrelevant).push_back(q);
    return out;
}

struct FiveNumberSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

/// Quartiles with linear interpolation between order statistics.
inline FiveNumberSummary five_number_summary(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, "summary of no values");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    auto at = [&](double p) {
        double pos = p * static_cast<double>(v.size() - 1);
        auto lo = static_cast<std::size_t>(std::floor(pos));
        auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {v.front(), at(0.25), at(0.5), at(0.75), v.back()};
}

} // namespace qcrawl
