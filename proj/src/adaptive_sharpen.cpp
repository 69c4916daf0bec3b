#include "adasharp/adaptive_sharpen.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "adasharp/degradation.hpp"
#include "adasharp/error.hpp"
#include "adasharp/mask_pgm.hpp"

namespace adasharp {

AlphaMap::AlphaMap(FloatPlane alpha) : plane_(std::move(alpha)) {
    if (plane_.empty()) {
        throw PreconditionError("alpha map must be nonempty");
    }
    for (double v : plane_.values()) {
        if (!std::isfinite(v) || v < 0.0) {
            throw PreconditionError("alpha map values must be finite and >= 0");
        }
    }
}

AlphaMap AlphaMap::constant(int width, int height, double alpha) {
    return AlphaMap(FloatPlane(width, height, alpha));
}

FloatPlane gaussian_smooth(const FloatPlane& plane, double sigma) {
    if (!std::isfinite(sigma) || sigma < 0.0) {
        throw PreconditionError("smoothing sigma must be finite and >= 0");
    }
    if (sigma == 0.0) {
        return plane;
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double v = std::exp(-0.5 * (k * k) / (sigma * sigma));
        kernel[static_cast<std::size_t>(k + radius)] = v;
        total += v;
    }
    for (double& v : kernel) {
        v /= total;
    }

    const int w = plane.width();
    const int h = plane.height();
    FloatPlane tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * plane.clamped(x + k, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    FloatPlane out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * tmp.clamped(x, y + k);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

AlphaMap build_alpha_map(const PartitionMask& mask, const AlphaTable& table, double smooth_sigma) {
    return AlphaMap(gaussian_smooth(build_hard_alpha_map(mask, table), smooth_sigma));
}

FloatPlane sharpen_plane(const FloatPlane& luma, const FloatPlane& alpha,
                         const UsmOptions& options) {
    if (luma.width() != alpha.width() || luma.height() != alpha.height()) {
        throw DimensionError("alpha map " + std::to_string(alpha.width()) + "x" +
                             std::to_string(alpha.height()) + " does not match frame " +
                             std::to_string(luma.width()) + "x" + std::to_string(luma.height()));
    }
    const FloatPlane blurred = options.blur_sigma > 0.0 ? gaussian_smooth(luma, options.blur_sigma)
                                                        : gaussian_blur_3x3(luma);
    FloatPlane out(luma.width(), luma.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = luma.values()[i];
        out.values()[i] = v + alpha.values()[i] * (v - blurred.values()[i]);
    }
    return out;
}

Frame sharpen_adaptive(const Frame& frame, const AlphaMap& amap, const UsmOptions& options) {
    if (frame.width() != amap.width() || frame.height() != amap.height()) {
        throw DimensionError("alpha map " + std::to_string(amap.width()) + "x" +
                             std::to_string(amap.height()) + " does not match frame " +
                             std::to_string(frame.width()) + "x" + std::to_string(frame.height()));
    }
    return frame.with_luma(sharpen_plane(luma_to_plane(frame), amap.plane(), options));
}

Frame usm_uniform(const Frame& frame, double alpha, const UsmOptions& options) {
    return sharpen_adaptive(frame, AlphaMap::constant(frame.width(), frame.height(), alpha),
                            options);
}

double seam_score(const FloatPlane& luma, const PartitionMask& mask) {
    require_mask_dimensions(mask, luma.width(), luma.height());
    double boundary_sum = 0.0;
    double interior_sum = 0.0;
    std::size_t boundary_n = 0;
    std::size_t interior_n = 0;

    auto visit = [&](int ax, int ay, int bx, int by, int coord_b) {
        // CU blocks are aligned to their own size, so a pair straddles a
        // boundary iff the second pixel starts a new block of either side.
        const bool boundary =
            coord_b % mask.at(ax, ay) == 0 || coord_b % mask.at(bx, by) == 0;
        const double d = std::abs(luma.at(ax, ay) - luma.at(bx, by));
        if (boundary) {
            boundary_sum += d;
            ++boundary_n;
        } else {
            interior_sum += d;
            ++interior_n;
        }
    };
    for (int y = 0; y < luma.height(); ++y) {
        for (int x = 0; x + 1 < luma.width(); ++x) {
            visit(x, y, x + 1, y, x + 1);
        }
    }
    for (int y = 0; y + 1 < luma.height(); ++y) {
        for (int x = 0; x < luma.width(); ++x) {
            visit(x, y, x, y + 1, y + 1);
        }
    }
    const double boundary_mean = boundary_n ? boundary_sum / static_cast<double>(boundary_n) : 0.0;
    const double interior_mean = interior_n ? interior_sum / static_cast<double>(interior_n) : 0.0;
    return boundary_mean - interior_mean;
}

}  // namespace adasharp
