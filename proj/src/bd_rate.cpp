#include "adasharp/bd_rate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adasharp/error.hpp"

namespace adasharp {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Three-point end slope, limited so the end segment stays shape preserving.
double end_slope(double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign(s) != sign(d0)) {
        s = 0.0;
    } else if (sign(d0) != sign(d1) && std::abs(s) > 3.0 * std::abs(d0)) {
        s = 3.0 * d0;
    }
    return s;
}

// Integrals of the cubic Hermite basis from 0 to t.
double h00_int(double t) { return t * t * t * t / 2.0 - t * t * t + t; }
double h10_int(double t) { return t * t * t * t / 4.0 - 2.0 * t * t * t / 3.0 + t * t / 2.0; }
double h01_int(double t) { return -t * t * t * t / 2.0 + t * t * t; }
double h11_int(double t) { return t * t * t * t / 4.0 - t * t * t / 3.0; }

struct PreparedCurve {
    std::vector<double> quality;
    std::vector<double> log_rate;
};

PreparedCurve prepare(const RdCurve& curve, const char* role, std::vector<std::string>& warnings) {
    if (curve.size() < kBdRateMinPoints) {
        throw ArityError(std::string(role) + " curve has " + std::to_string(curve.size()) +
                         " points; BD-Rate needs at least " + std::to_string(kBdRateMinPoints));
    }
    for (const RdPoint& p : curve.points()) {
        if (!std::isfinite(p.quality)) {
            throw PreconditionError(std::string(role) + " curve has a non-finite quality value");
        }
    }
    if (!curve.quality_monotone()) {
        warnings.push_back(std::string(role) +
                           " curve quality is not monotone in rate; points reordered by quality");
    }
    // Equal qualities collapse to one knot at the mean log-rate.
    std::map<double, std::pair<double, int>> by_quality;
    for (const RdPoint& p : curve.points()) {
        auto& [sum, count] = by_quality[p.quality];
        sum += std::log2(p.rate_kbps);
        ++count;
    }
    if (by_quality.size() != curve.size()) {
        warnings.push_back(std::string(role) +
                           " curve repeats quality values; their log-rates were averaged");
    }
    PreparedCurve out;
    for (const auto& [q, acc] : by_quality) {
        out.quality.push_back(q);
        out.log_rate.push_back(acc.first / acc.second);
    }
    if (out.quality.size() < 2) {
        throw ArityError(std::string(role) + " curve has fewer than two distinct quality values");
    }
    return out;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw PreconditionError("monotone cubic needs at least two knots with matching values");
    }
    std::vector<double> h(n - 1);
    std::vector<double> delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        if (!(h[k] > 0.0)) {
            throw PreconditionError("monotone cubic knots must be strictly increasing");
        }
        delta[k] = (y_[k + 1] - y_[k]) / h[k];
    }

    slope_.assign(n, 0.0);
    if (n == 2) {
        slope_[0] = slope_[1] = delta[0];
    } else {
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (sign(delta[k - 1]) * sign(delta[k]) <= 0) {
                slope_[k] = 0.0;
                continue;
            }
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            slope_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
        slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    cumulative_.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        // Full-segment Hermite integral: h (y0 + y1) / 2 + h^2 (d0 - d1) / 12.
        cumulative_[k + 1] = cumulative_[k] + h[k] * (y_[k] + y_[k + 1]) / 2.0 +
                             h[k] * h[k] * (slope_[k] - slope_[k + 1]) / 12.0;
    }
}

std::size_t MonotoneCubic::segment(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin() - 1, 0));
    return std::min(k, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[k] + (t3 - 2.0 * t2 + t) * h * slope_[k] +
           (-2.0 * t3 + 3.0 * t2) * y_[k + 1] + (t3 - t2) * h * slope_[k + 1];
}

double MonotoneCubic::antiderivative(double x) const {
    const std::size_t k = segment(x);
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    return cumulative_[k] + h * (y_[k] * h00_int(t) + h * slope_[k] * h10_int(t) +
                                 y_[k + 1] * h01_int(t) + h * slope_[k + 1] * h11_int(t));
}

double MonotoneCubic::integral(double a, double b) const {
    if (a < x_.front() || b > x_.back() || a > b) {
        throw PreconditionError("integration interval outside the interpolant's knot range");
    }
    return antiderivative(b) - antiderivative(a);
}

BdRateResult bd_rate(const RdCurve& anchor, const RdCurve& test) {
    BdRateResult result;
    result.metric = anchor.metric();
    if (anchor.metric() != test.metric()) {
        result.warnings.push_back("curves use different metrics: '" + anchor.metric() + "' vs '" +
                                  test.metric() + "'");
    }
    const PreparedCurve a = prepare(anchor, "anchor", result.warnings);
    const PreparedCurve t = prepare(test, "test", result.warnings);

    const double lo = std::max(a.quality.front(), t.quality.front());
    const double hi = std::min(a.quality.back(), t.quality.back());
    if (!(hi > lo)) {
        throw OverlapError("anchor and test quality ranges do not overlap: [" +
                           format_number(a.quality.front()) + ", " +
                           format_number(a.quality.back()) + "] vs [" +
                           format_number(t.quality.front()) + ", " +
                           format_number(t.quality.back()) + "]");
    }
    const MonotoneCubic fa(a.quality, a.log_rate);
    const MonotoneCubic ft(t.quality, t.log_rate);
    const double mean_diff = (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);

    result.percent = (std::exp2(mean_diff) - 1.0) * 100.0;
    result.overlap_lo = lo;
    result.overlap_hi = hi;
    return result;
}

}  // namespace adasharp
