#include "adasharp/ctu_partition.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "adasharp/error.hpp"
#include "adasharp/parallel.hpp"

namespace adasharp {

void RdoParams::validate() const {
    if (!std::isfinite(lambda_rdo) || !std::isfinite(leaf_bits) || !std::isfinite(split_bits)) {
        throw PreconditionError("RDO parameters must be finite");
    }
    if (lambda_rdo < 0.0) {
        throw PreconditionError("lambda must be >= 0, got " + std::to_string(lambda_rdo));
    }
    if (leaf_bits <= 0.0) {
        throw PreconditionError("leaf_bits must be > 0, got " + std::to_string(leaf_bits));
    }
    if (split_bits < 0.0) {
        throw PreconditionError("split_bits must be >= 0, got " + std::to_string(split_bits));
    }
}

double leaf_distortion(std::span<const double> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    double sse = 0.0;
    for (double v : samples) {
        const double d = v - mean;
        sse += d * d;
    }
    return sse;
}

namespace {

class QuadtreeSearch {
public:
    QuadtreeSearch(const FloatPlane& ctu, const RdoParams& params)
        : ctu_(ctu),
          leaf_rate_(params.lambda_rdo * params.leaf_bits),
          split_rate_(params.lambda_rdo * params.split_bits) {
        block_.reserve(kCtuSize * kCtuSize);
    }

    // Returns the minimal cost of the node and appends its leaves.
    double solve(int x, int y, int size, CtuPartition& out) {
        const double leaf_cost = distortion(x, y, size) + leaf_rate_;
        if (size == kCuSizes.front()) {
            out.leaves.push_back({x, y, size});
            return leaf_cost;
        }

        const std::size_t mark = out.leaves.size();
        const std::size_t splits_before = out.split_count;
        const int half = size / 2;
        double split_cost = solve(x, y, half, out);
        split_cost += solve(x + half, y, half, out);
        split_cost += solve(x, y + half, half, out);
        split_cost += solve(x + half, y + half, half, out);
        split_cost += split_rate_;

        if (leaf_cost <= split_cost) {
            out.leaves.resize(mark);
            out.split_count = splits_before;
            out.leaves.push_back({x, y, size});
            return leaf_cost;
        }
        ++out.split_count;
        return split_cost;
    }

private:
    double distortion(int x0, int y0, int size) {
        block_.clear();
        for (int y = y0; y < y0 + size; ++y) {
            for (int x = x0; x < x0 + size; ++x) {
                block_.push_back(ctu_.at(x, y));
            }
        }
        return leaf_distortion(block_);
    }

    const FloatPlane& ctu_;
    double leaf_rate_;
    double split_rate_;
    std::vector<double> block_;
};

}  // namespace

CtuPartition partition_ctu(const FloatPlane& ctu, const RdoParams& params) {
    params.validate();
    if (ctu.width() != kCtuSize || ctu.height() != kCtuSize) {
        throw DimensionError("CTU must be 64x64, got " + std::to_string(ctu.width()) + "x" +
                             std::to_string(ctu.height()));
    }
    CtuPartition result;
    QuadtreeSearch search(ctu, params);
    result.cost = search.solve(0, 0, kCtuSize, result);
    return result;
}

FramePartition partition_frame(const FloatPlane& luma, const RdoParams& params, int jobs) {
    params.validate();
    if (luma.empty()) {
        throw PreconditionError("cannot partition an empty plane");
    }
    const int ctus_x = (luma.width() + kCtuSize - 1) / kCtuSize;
    const int ctus_y = (luma.height() + kCtuSize - 1) / kCtuSize;
    const auto ctu_count = static_cast<std::size_t>(ctus_x) * static_cast<std::size_t>(ctus_y);

    std::vector<CtuPartition> results(ctu_count);
    parallel_for(ctu_count, jobs, [&](std::size_t i) {
        const int ox = static_cast<int>(i % static_cast<std::size_t>(ctus_x)) * kCtuSize;
        const int oy = static_cast<int>(i / static_cast<std::size_t>(ctus_x)) * kCtuSize;
        FloatPlane ctu(kCtuSize, kCtuSize);
        for (int y = 0; y < kCtuSize; ++y) {
            for (int x = 0; x < kCtuSize; ++x) {
                ctu.at(x, y) = luma.clamped(ox + x, oy + y);
            }
        }
        results[i] = partition_ctu(ctu, params);
    });

    std::vector<std::uint8_t> sizes(luma.size());
    FramePartition out{PartitionMask::uniform(luma.width(), luma.height(), kCtuSize), 0, {}, 0.0};
    for (std::size_t i = 0; i < ctu_count; ++i) {
        const int ox = static_cast<int>(i % static_cast<std::size_t>(ctus_x)) * kCtuSize;
        const int oy = static_cast<int>(i / static_cast<std::size_t>(ctus_x)) * kCtuSize;
        out.leaf_count += results[i].leaves.size();
        out.total_cost += results[i].cost;
        for (const CuLeaf& leaf : results[i].leaves) {
            ++out.leaves_by_size[static_cast<std::size_t>(cu_size_index(leaf.size))];
            for (int y = oy + leaf.y; y < std::min(oy + leaf.y + leaf.size, luma.height()); ++y) {
                for (int x = ox + leaf.x; x < std::min(ox + leaf.x + leaf.size, luma.width());
                     ++x) {
                    sizes[static_cast<std::size_t>(y) * static_cast<std::size_t>(luma.width()) +
                          static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(leaf.size);
                }
            }
        }
    }
    out.mask = PartitionMask(luma.width(), luma.height(), std::move(sizes));
    return out;
}

FramePartition partition_frame(const Frame& frame, const RdoParams& params, int jobs) {
    return partition_frame(luma_to_plane(frame), params, jobs);
}

}  // namespace adasharp
