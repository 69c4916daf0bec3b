#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adasharp {

inline constexpr int kCtuSize = 64;
inline constexpr std::array<int, 4> kCuSizes = {8, 16, 32, 64};

constexpr bool is_cu_size(int v) noexcept { return v == 8 || v == 16 || v == 32 || v == 64; }

/// Index into kCuSizes (8 -> 0, ..., 64 -> 3). Caller guarantees is_cu_size.
constexpr int cu_size_index(int size) noexcept {
    return size == 8 ? 0 : size == 16 ? 1 : size == 32 ? 2 : 3;
}

/// Per-pixel CU-size map. Every entry is one of 8/16/32/64; the map is laid
/// over 64x64 CTUs anchored at the frame origin.
class PartitionMask {
public:
    PartitionMask(int width, int height, std::vector<std::uint8_t> cu_size);

    static PartitionMask uniform(int width, int height, int cu_size);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int at(int x, int y) const {
        return cu_size_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                        static_cast<std::size_t>(x)];
    }
    std::span<const std::uint8_t> values() const noexcept { return cu_size_; }

    /// Pixel count per CU size, indexed like kCuSizes.
    std::array<std::size_t, 4> histogram() const;

    friend bool operator==(const PartitionMask&, const PartitionMask&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> cu_size_;
};

/// First pixel breaking quadtree consistency, as "(x, y): reason", or nullopt
/// when every s-valued pixel sits in an s-aligned block of uniform value s
/// (blocks clipped to the frame at the right and bottom borders).
std::optional<std::string> find_quadtree_violation(const PartitionMask& mask);

}  // namespace adasharp
