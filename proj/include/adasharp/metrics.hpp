#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adasharp/frame.hpp"
#include "json.hpp"

namespace adasharp {

/// PSNR in dB; identical inputs give an explicit infinite flag instead of a
/// number.
struct Psnr {
    double db = 0.0;
    bool infinite = false;

    /// +inf for the infinite case, for places that need a plain number.
    double value() const noexcept;
};

Psnr psnr_from_mse(double mse);
double mean_squared_error(const FloatPlane& ref, const FloatPlane& dist);

Psnr psnr(const FloatPlane& ref, const FloatPlane& dist);
Psnr psnr(const Frame& ref, const Frame& dist);
/// Pooled over the sequence: PSNR of the mean per-frame MSE.
Psnr psnr(const Sequence& ref, const Sequence& dist);

inline constexpr int kMsSsimMinSize = 176;

/// Five-scale MS-SSIM on luma: 11x11 Gaussian window (sigma 1.5, valid
/// region only), K1 = 0.01, K2 = 0.03, L = 255, weights
/// {0.0448, 0.2856, 0.3001, 0.2363, 0.1333}, 2x2 mean downsampling (odd
/// sizes replicate their last row/column). Negative contrast-structure terms
/// are clamped to 0 before exponentiation.
double ms_ssim(const FloatPlane& ref, const FloatPlane& dist);
double ms_ssim(const Frame& ref, const Frame& dist);

inline constexpr double kCharbonnierEpsilon = 1e-12;

/// Mean over pixels of sqrt(d^2 + eps^2), eps = 1e-12.
double charbonnier(const FloatPlane& ref, const FloatPlane& dist);
double charbonnier(const Frame& ref, const Frame& dist);

inline constexpr double kDefaultRdLambda = 85.0;
inline constexpr double kDefaultGamma = 10.0;

/// J = R + lambda * D with D the mean squared error.
double rd_cost(double rate_bits, double mse, double lambda = kDefaultRdLambda);

/// l_rec + gamma * l_rd.
double overall_score(double l_rec, double l_rd, double gamma = kDefaultGamma);

struct FrameQuality {
    Psnr psnr;
    std::optional<double> ms_ssim;  ///< Absent when the frame is below kMsSsimMinSize.
    double charbonnier = 0.0;
};

struct QualityReport {
    std::vector<FrameQuality> frames;
    Psnr psnr;                      ///< Pooled over all frames.
    std::optional<double> ms_ssim;  ///< Mean of per-frame values.
    double charbonnier = 0.0;       ///< Mean of per-frame values.
};

QualityReport evaluate_quality(const Sequence& ref, const Sequence& dist, int jobs = 1);

nlohmann::json to_json(const Psnr& p);
nlohmann::json to_json(const QualityReport& report);

/// Metrics usable as RD-curve quality axes (higher is better): "psnr", "ms_ssim".
bool is_rd_metric(const std::string& name);
double sequence_metric(const std::string& name, const Sequence& ref, const Sequence& dist,
                       int jobs = 1);

}  // namespace adasharp
