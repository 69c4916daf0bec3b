#pragma once

#include <vector>

#include "adasharp/alpha_table.hpp"
#include "adasharp/frame.hpp"
#include "adasharp/partition_mask.hpp"

namespace adasharp {

/// Separable [1,2,1]/4 binomial blur (horizontal, then vertical) with
/// replicate padding.
FloatPlane gaussian_blur_3x3(const FloatPlane& plane);

/// alpha(x, y) = table[mask(x, y)].
FloatPlane build_hard_alpha_map(const PartitionMask& mask, const AlphaTable& table);

/// LQ = (GT + alpha * Blur(GT)) / (1 + alpha), pixelwise.
FloatPlane degrade_plane_direct(const FloatPlane& gt, const FloatPlane& alpha);

struct FixedPointOptions {
    double tol = 1e-6;
    int max_iter = 500;
};

struct FixedPointResult {
    FloatPlane plane;
    int iterations = 0;
    /// Sup-norm change of each iterate; decays at most by max(alpha)/(1+alpha).
    std::vector<double> step_norms;
};

/// Solves LQ = (GT + alpha * Blur(LQ)) / (1 + alpha) by Picard iteration from
/// LQ = GT. The solution is the exact preimage of GT under unsharp masking
/// with the same alpha map. Throws ConvergenceError after max_iter steps.
FixedPointResult degrade_plane_fixed_point(const FloatPlane& gt, const FloatPlane& alpha,
                                           const FixedPointOptions& options = {});

struct DegradedFrame {
    Frame frame;       ///< Luma rounded and clamped to 8 bits, chroma copied.
    FloatPlane luma;   ///< Unquantized degraded luma.
    int iterations = 0;
};

DegradedFrame degrade_direct(const Frame& gt, const PartitionMask& mask, const AlphaTable& table);
DegradedFrame degrade_fixed_point(const Frame& gt, const PartitionMask& mask,
                                  const AlphaTable& table, const FixedPointOptions& options = {});

}  // namespace adasharp
