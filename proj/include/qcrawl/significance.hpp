#pragma once

#include "qcrawl/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qcrawl {

/// Two-sided tail P(|T| >= |t|) for Student's t with `df` degrees of freedom,
/// via the regularized incomplete beta I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
    if (std::isnan(t)) throw Error(ErrorCode::InvalidArgument, "t statistic is NaN");
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return 1.0;
    double x = df / (df + t * t);
    return std::clamp(boost::math::ibeta(df / 2.0, 0.5, x), 0.0, 1.0);
}

struct PairedTTest {
    double t = 0.0;
    double p = 1.0;
    std::size_t df = 0;
};

/// Paired two-sided t-test on a[i] - b[i].
/// All-zero differences give t = 0, p = 1. Constant nonzero differences have
/// zero spread and give t = +-inf, p = 0.
inline PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "paired t-test needs at least 2 pairs");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));

    PairedTTest r;
    r.df = n - 1;
    bool all_zero = std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
    if (all_zero) return r;
    if (sd == 0.0) {
        r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p = student_t_two_sided_p(r.t, static_cast<double>(r.df));
    return r;
}

struct PairSignificance {
    std::string a;
    std::string b;
    double t = 0.0;
    double p_raw = 1.0;
    double p_corrected = 1.0;
    bool significant = false;
};

/// All unordered pairs (i < j in input order), Bonferroni-corrected over the
/// number of pairs: p_corrected = min(1, p * C).
inline std::vector<PairSignificance>
paired_t_test_bonferroni(const std::vector<std::pair<std::string, std::vector<double>>>& per_query, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
    if (per_query.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two strategies");
    const std::size_t len = per_query.front().second.size();
    for (const auto& [name, v] : per_query)
        if (v.size() != len) throw Error(ErrorCode::LengthMismatch, "score list for '" + name + "' is misaligned");

    const std::size_t m = per_query.size();
    const double pairs = static_cast<double>(m * (m - 1) / 2);
    std::vector<PairSignificance> out;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            auto r = paired_t_test(per_query[i].second, per_query[j].second);
            PairSignificance s;
            s.a = per_query[i].first;
            s.b = per_query[j].first;
            s.t = r.t;
            s.p_raw = r.p;
            s.p_corrected = std::min(1.0, r.p * pairs);
            s.significant = s.p_corrected <= alpha;
            out.push_back(std::move(s));
        }
    return out;
}

} // namespace qcrawl
