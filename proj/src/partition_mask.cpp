#include "adasharp/partition_mask.hpp"

#include <algorithm>

#include "adasharp/error.hpp"

namespace adasharp {

PartitionMask::PartitionMask(int width, int height, std::vector<std::uint8_t> cu_size)
    : width_(width), height_(height), cu_size_(std::move(cu_size)) {
    if (width <= 0 || height <= 0) {
        throw PreconditionError("mask dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
    }
    if (cu_size_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw PreconditionError("mask length does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
    }
    for (std::size_t i = 0; i < cu_size_.size(); ++i) {
        if (!is_cu_size(cu_size_[i])) {
            const auto x = static_cast<int>(i % static_cast<std::size_t>(width));
            const auto y = static_cast<int>(i / static_cast<std::size_t>(width));
            throw InvalidMaskError("invalid CU size " + std::to_string(cu_size_[i]) +
                                   " at pixel (" + std::to_string(x) + ", " +
                                   std::to_string(y) + ")");
        }
    }
}

PartitionMask PartitionMask::uniform(int width, int height, int cu_size) {
    return PartitionMask(
        width, height,
        std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                      static_cast<std::size_t>(std::max(height, 0)),
                                  static_cast<std::uint8_t>(cu_size)));
}

std::array<std::size_t, 4> PartitionMask::histogram() const {
    std::array<std::size_t, 4> counts{};
    for (auto v : cu_size_) {
        ++counts[static_cast<std::size_t>(cu_size_index(v))];
    }
    return counts;
}

std::optional<std::string> find_quadtree_violation(const PartitionMask& mask) {
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const int s = mask.at(x, y);
            // CTUs sit on multiples of 64, so the s-grid is absolute.
            const int bx = x - x % s;
            const int by = y - y % s;
            const int ex = std::min(bx + s, mask.width());
            const int ey = std::min(by + s, mask.height());
            for (int yy = by; yy < ey; ++yy) {
                for (int xx = bx; xx < ex; ++xx) {
                    if (mask.at(xx, yy) != s) {
                        return "(" + std::to_string(x) + ", " + std::to_string(y) + "): size " +
                               std::to_string(s) + " block contains size " +
                               std::to_string(mask.at(xx, yy)) + " at (" + std::to_string(xx) +
                               ", " + std::to_string(yy) + ")";
                    }
                }
            }
            // Skip the remainder of this block's row segment.
            x = ex - 1;
        }
    }
    return std::nullopt;
}

}  // namespace adasharp
