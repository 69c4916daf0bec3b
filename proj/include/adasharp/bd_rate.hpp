#pragma once

#include <span>
#include <string>
#include <vector>

#include "adasharp/rd_curve.hpp"

namespace adasharp {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// slopes: weighted harmonic mean inside, one-sided three-point estimate at
/// the ends). Knots must be strictly increasing; two knots give a line.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    /// Exact integral of the interpolant over [a, b], both inside the knot range.
    double integral(double a, double b) const;

    double x_min() const noexcept { return x_.front(); }
    double x_max() const noexcept { return x_.back(); }
    std::span<const double> slopes() const noexcept { return slope_; }

private:
    std::size_t segment(double x) const;
    double antiderivative(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> slope_;
    std::vector<double> cumulative_;  ///< Integral from x_[0] to x_[k].
};

inline constexpr std::size_t kBdRateMinPoints = 4;

struct BdRateResult {
    std::string metric;
    double percent = 0.0;  ///< Negative: the test curve needs fewer bits.
    double overlap_lo = 0.0;
    double overlap_hi = 0.0;
    std::vector<std::string> warnings;
};

/// Bjontegaard delta rate: log2(rate) is interpolated as a function of
/// quality for both curves, the difference is averaged over the common
/// quality interval and mapped back to a percentage. Curves whose quality
/// is not monotone in rate are reordered by quality and flagged in warnings.
BdRateResult bd_rate(const RdCurve& anchor, const RdCurve& test);

}  // namespace adasharp
