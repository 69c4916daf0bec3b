#pragma once

#include <vector>

#include "adasharp/adaptive_sharpen.hpp"
#include "adasharp/ctu_partition.hpp"
#include "adasharp/degradation.hpp"
#include "adasharp/frame.hpp"

namespace adasharp {

// Frame-parallel wrappers used by the CLI and the pipeline. Output order
// always follows input order.

std::vector<FramePartition> partition_sequence(const Sequence& seq, const RdoParams& params,
                                               int jobs = 1);

std::vector<PartitionMask> masks_of(const std::vector<FramePartition>& partitions);

struct SequenceResult {
    Sequence sequence;
    double mean_alpha = 0.0;  ///< Mean of the applied alpha map over all pixels and frames.
    int max_iterations = 0;   ///< Fixed-point mode only.
};

/// Throws DimensionError when mask count or geometry disagrees with seq.
SequenceResult degrade_sequence(const Sequence& gt, const std::vector<PartitionMask>& masks,
                                const AlphaTable& table, bool fixed_point,
                                const FixedPointOptions& options = {}, int jobs = 1);

SequenceResult sharpen_sequence(const Sequence& input, const std::vector<PartitionMask>& masks,
                                const AlphaTable& table, double smooth_sigma,
                                const UsmOptions& usm = {}, int jobs = 1);

SequenceResult usm_sequence(const Sequence& input, double alpha, const UsmOptions& usm = {},
                            int jobs = 1);

}  // namespace adasharp
