#include "adasharp/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adasharp/error.hpp"
#include "adasharp/mask_pgm.hpp"

namespace adasharp {

namespace {

void require_same_size(const FloatPlane& a, const FloatPlane& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw DimensionError(std::string(what) + ": " + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                             "x" + std::to_string(b.height()));
    }
}

}  // namespace

FloatPlane gaussian_blur_3x3(const FloatPlane& plane) {
    if (plane.empty()) {
        throw PreconditionError("cannot blur an empty plane");
    }
    const int w = plane.width();
    const int h = plane.height();
    FloatPlane horizontal(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            horizontal.at(x, y) =
                (plane.clamped(x - 1, y) + 2.0 * plane.at(x, y) + plane.clamped(x + 1, y)) / 4.0;
        }
    }
    FloatPlane out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.at(x, y) = (horizontal.clamped(x, y - 1) + 2.0 * horizontal.at(x, y) +
                            horizontal.clamped(x, y + 1)) /
                           4.0;
        }
    }
    return out;
}

FloatPlane build_hard_alpha_map(const PartitionMask& mask, const AlphaTable& table) {
    FloatPlane out(mask.width(), mask.height());
    const std::array<double, 4> lut = {table.at(8), table.at(16), table.at(32), table.at(64)};
    auto dst = out.values();
    const auto src = mask.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = lut[static_cast<std::size_t>(cu_size_index(src[i]))];
    }
    return out;
}

FloatPlane degrade_plane_direct(const FloatPlane& gt, const FloatPlane& alpha) {
    require_same_size(gt, alpha, "alpha map does not match frame");
    const FloatPlane blurred = gaussian_blur_3x3(gt);
    FloatPlane out(gt.width(), gt.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double a = alpha.values()[i];
        out.values()[i] = (gt.values()[i] + a * blurred.values()[i]) / (1.0 + a);
    }
    return out;
}

FixedPointResult degrade_plane_fixed_point(const FloatPlane& gt, const FloatPlane& alpha,
                                           const FixedPointOptions& options) {
    require_same_size(gt, alpha, "alpha map does not match frame");
    if (!(options.tol > 0.0)) {
        throw PreconditionError("fixed-point tolerance must be > 0");
    }
    if (options.max_iter < 1) {
        throw PreconditionError("fixed-point max_iter must be >= 1");
    }

    FixedPointResult result{gt, 0, {}};
    FloatPlane next(gt.width(), gt.height());
    while (result.iterations < options.max_iter) {
        const FloatPlane blurred = gaussian_blur_3x3(result.plane);
        double step = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            const double a = alpha.values()[i];
            const double v = (gt.values()[i] + a * blurred.values()[i]) / (1.0 + a);
            step = std::max(step, std::abs(v - result.plane.values()[i]));
            next.values()[i] = v;
        }
        std::swap(result.plane, next);
        ++result.iterations;
        result.step_norms.push_back(step);
        if (step < options.tol) {
            return result;
        }
    }
    const double residual = result.step_norms.back();
    throw ConvergenceError("fixed-point degradation did not converge in " +
                               std::to_string(options.max_iter) +
                               " iterations (last change " + std::to_string(residual) + ")",
                           residual);
}

DegradedFrame degrade_direct(const Frame& gt, const PartitionMask& mask, const AlphaTable& table) {
    require_mask_dimensions(mask, gt.width(), gt.height());
    FloatPlane luma = degrade_plane_direct(luma_to_plane(gt), build_hard_alpha_map(mask, table));
    Frame frame = gt.with_luma(luma);
    return {std::move(frame), std::move(luma), 1};
}

DegradedFrame degrade_fixed_point(const Frame& gt, const PartitionMask& mask,
                                  const AlphaTable& table, const FixedPointOptions& options) {
    require_mask_dimensions(mask, gt.width(), gt.height());
    auto fp = degrade_plane_fixed_point(luma_to_plane(gt), build_hard_alpha_map(mask, table),
                                        options);
    Frame frame = gt.with_luma(fp.plane);
    return {std::move(frame), std::move(fp.plane), fp.iterations};
}

}  // namespace adasharp
