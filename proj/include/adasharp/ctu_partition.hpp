#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "adasharp/frame.hpp"
#include "adasharp/partition_mask.hpp"

namespace adasharp {

/// Cost model of the quadtree search: J = D + lambda * R, where R charges
/// leaf_bits per leaf CU and split_bits per split flag.
struct RdoParams {
    double lambda_rdo = 10.0;
    double leaf_bits = 32.0;
    double split_bits = 1.0;

    /// Throws PreconditionError unless all finite, lambda >= 0, leaf_bits > 0,
    /// split_bits >= 0.
    void validate() const;
};

/// Sum of squared deviations from the block mean (N * variance).
double leaf_distortion(std::span<const double> samples);

/// A leaf CU, positioned relative to its CTU origin.
struct CuLeaf {
    int x = 0;
    int y = 0;
    int size = 0;

    friend bool operator==(const CuLeaf&, const CuLeaf&) = default;
};

/// Optimal quadtree of one CTU. Leaves are listed in z-order, which
/// determines the tree uniquely.
struct CtuPartition {
    std::vector<CuLeaf> leaves;
    std::size_t split_count = 0;
    double cost = 0.0;
};

/// Bottom-up RDO over split decisions of a 64x64 block. A node of size >= 16
/// stays a leaf iff J_leaf <= J_split, so ties keep the larger CU; 8x8 nodes
/// are always leaves. Throws DimensionError unless ctu is 64x64.
CtuPartition partition_ctu(const FloatPlane& ctu, const RdoParams& params);

struct FramePartition {
    PartitionMask mask;
    std::size_t leaf_count = 0;  ///< Leaves over all (padded) CTUs.
    std::array<std::size_t, 4> leaves_by_size{};  ///< Indexed like kCuSizes.
    double total_cost = 0.0;
};

/// Edge-replicates the plane up to a multiple of 64, partitions every CTU
/// independently (on up to `jobs` threads) and crops the mask to frame size.
FramePartition partition_frame(const FloatPlane& luma, const RdoParams& params, int jobs = 1);
FramePartition partition_frame(const Frame& frame, const RdoParams& params, int jobs = 1);

}  // namespace adasharp
