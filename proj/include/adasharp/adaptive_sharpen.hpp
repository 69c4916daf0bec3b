#pragma once

#include "adasharp/alpha_table.hpp"
#include "adasharp/frame.hpp"
#include "adasharp/partition_mask.hpp"

namespace adasharp {

/// Per-pixel sharpening strength, finite and nonnegative everywhere.
class AlphaMap {
public:
    explicit AlphaMap(FloatPlane alpha);
    static AlphaMap constant(int width, int height, double alpha);

    int width() const noexcept { return plane_.width(); }
    int height() const noexcept { return plane_.height(); }
    const FloatPlane& plane() const noexcept { return plane_; }
    double at(int x, int y) const { return plane_.at(x, y); }

private:
    FloatPlane plane_;
};

/// Normalized Gaussian smoothing, kernel truncated at radius ceil(3 sigma),
/// replicate edges. sigma == 0 returns the input unchanged.
FloatPlane gaussian_smooth(const FloatPlane& plane, double sigma);

/// Hard CU-size lookup, then Gaussian smoothing with smooth_sigma to soften
/// the steps at CU boundaries. Smoothing is a convex combination, so values
/// stay within [table.min(), table.max()].
AlphaMap build_alpha_map(const PartitionMask& mask, const AlphaTable& table, double smooth_sigma);

/// Blur inside the unsharp mask. sigma == 0 selects the 3x3 binomial kernel
/// shared with degradation, which keeps the two operations exact inverses.
struct UsmOptions {
    double blur_sigma = 0.0;
};

/// I + alpha * (I - B(I)) pixelwise, unclamped.
FloatPlane sharpen_plane(const FloatPlane& luma, const FloatPlane& alpha,
                         const UsmOptions& options = {});

Frame sharpen_adaptive(const Frame& frame, const AlphaMap& amap, const UsmOptions& options = {});
Frame usm_uniform(const Frame& frame, double alpha, const UsmOptions& options = {});

/// Mean |difference| over horizontally/vertically adjacent pixel pairs that
/// straddle a CU boundary, minus the same mean over pairs inside a CU.
/// Positive values indicate visible block seams.
double seam_score(const FloatPlane& luma, const PartitionMask& mask);

}  // namespace adasharp
