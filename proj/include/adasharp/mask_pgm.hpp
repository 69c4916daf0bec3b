#pragma once

#include <filesystem>
#include <iosfwd>

#include "adasharp/partition_mask.hpp"

namespace adasharp {

/// Binary PGM (P5, maxval 255) with the CU size stored literally as the gray
/// value. Header comments are tolerated on read.
PartitionMask read_mask_pgm(std::istream& in);
void write_mask_pgm(const PartitionMask& mask, std::ostream& out);

PartitionMask read_mask_pgm_file(const std::filesystem::path& path);
void write_mask_pgm_file(const PartitionMask& mask, const std::filesystem::path& path);

/// Throws DimensionError unless the mask is exactly width x height.
void require_mask_dimensions(const PartitionMask& mask, int width, int height);

}  // namespace adasharp
