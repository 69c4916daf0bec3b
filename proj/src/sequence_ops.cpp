#include "adasharp/sequence_ops.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "adasharp/error.hpp"
#include "adasharp/mask_pgm.hpp"
#include "adasharp/parallel.hpp"

namespace adasharp {

namespace {

void require_masks(const Sequence& seq, const std::vector<PartitionMask>& masks) {
    if (masks.size() != seq.size()) {
        throw DimensionError("have " + std::to_string(masks.size()) + " masks for " +
                             std::to_string(seq.size()) + " frames");
    }
    for (const auto& m : masks) {
        require_mask_dimensions(m, seq.width(), seq.height());
    }
}

SequenceResult collect(const Sequence& like, std::vector<std::optional<Frame>>& frames,
                       const std::vector<double>& alpha_means, int max_iterations) {
    std::vector<Frame> out;
    out.reserve(frames.size());
    for (auto& f : frames) {
        out.push_back(std::move(*f));
    }
    double mean = 0.0;
    for (double a : alpha_means) {
        mean += a;
    }
    mean /= static_cast<double>(alpha_means.size());
    return {Sequence(std::move(out), like.fps_num(), like.fps_den()), mean, max_iterations};
}

}  // namespace

std::vector<FramePartition> partition_sequence(const Sequence& seq, const RdoParams& params,
                                               int jobs) {
    std::vector<std::optional<FramePartition>> parts(seq.size());
    parallel_for(seq.size(), jobs, [&](std::size_t i) { parts[i] = partition_frame(seq[i], params); });
    std::vector<FramePartition> out;
    out.reserve(parts.size());
    for (auto& p : parts) {
        out.push_back(std::move(*p));
    }
    return out;
}

std::vector<PartitionMask> masks_of(const std::vector<FramePartition>& partitions) {
    std::vector<PartitionMask> masks;
    masks.reserve(partitions.size());
    for (const auto& p : partitions) {
        masks.push_back(p.mask);
    }
    return masks;
}

SequenceResult degrade_sequence(const Sequence& gt, const std::vector<PartitionMask>& masks,
                                const AlphaTable& table, bool fixed_point,
                                const FixedPointOptions& options, int jobs) {
    require_masks(gt, masks);
    std::vector<std::optional<Frame>> frames(gt.size());
    std::vector<double> alpha_means(gt.size());
    std::vector<int> iterations(gt.size());
    parallel_for(gt.size(), jobs, [&](std::size_t i) {
        DegradedFrame d = fixed_point ? degrade_fixed_point(gt[i], masks[i], table, options)
                                      : degrade_direct(gt[i], masks[i], table);
        alpha_means[i] = build_hard_alpha_map(masks[i], table).mean();
        iterations[i] = d.iterations;
        frames[i] = std::move(d.frame);
    });
    return collect(gt, frames, alpha_means,
                   fixed_point ? *std::max_element(iterations.begin(), iterations.end()) : 0);
}

SequenceResult sharpen_sequence(const Sequence& input, const std::vector<PartitionMask>& masks,
                                const AlphaTable& table, double smooth_sigma,
                                const UsmOptions& usm, int jobs) {
    require_masks(input, masks);
    std::vector<std::optional<Frame>> frames(input.size());
    std::vector<double> alpha_means(input.size());
    parallel_for(input.size(), jobs, [&](std::size_t i) {
        const AlphaMap amap = build_alpha_map(masks[i], table, smooth_sigma);
        alpha_means[i] = amap.plane().mean();
        frames[i] = sharpen_adaptive(input[i], amap, usm);
    });
    return collect(input, frames, alpha_means, 0);
}

SequenceResult usm_sequence(const Sequence& input, double alpha, const UsmOptions& usm, int jobs) {
    std::vector<std::optional<Frame>> frames(input.size());
    std::vector<double> alpha_means(input.size(), alpha);
    parallel_for(input.size(), jobs,
                 [&](std::size_t i) { frames[i] = usm_uniform(input[i], alpha, usm); });
    return collect(input, frames, alpha_means, 0);
}

}  // namespace adasharp
