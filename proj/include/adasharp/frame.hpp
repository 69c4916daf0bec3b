#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace adasharp {

/// Real-valued plane used for all intermediate arithmetic (blur, alpha maps,
/// unclamped sharpening output).
class FloatPlane {
public:
    FloatPlane() = default;
    FloatPlane(int width, int height, double fill = 0.0);
    FloatPlane(int width, int height, std::vector<double> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& at(int x, int y) { return values_[index(x, y)]; }
    double at(int x, int y) const { return values_[index(x, y)]; }

    /// Replicate-padded read: coordinates are clamped into the plane.
    double clamped(int x, int y) const;

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double min() const;
    double max() const;
    double mean() const;

    friend bool operator==(const FloatPlane&, const FloatPlane&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Half-resolution Cb/Cr planes of a 4:2:0 frame.
struct ChromaPlanes {
    std::vector<std::uint8_t> cb;
    std::vector<std::uint8_t> cr;

    friend bool operator==(const ChromaPlanes&, const ChromaPlanes&) = default;
};

/// One 8-bit picture: luma plus optional 4:2:0 chroma. Invariants are checked
/// in the constructor, so a Frame in hand is always well formed.
class Frame {
public:
    Frame(int width, int height, std::vector<std::uint8_t> luma,
          std::optional<ChromaPlanes> chroma = std::nullopt);

    /// Constant frame, luma only.
    static Frame filled(int width, int height, std::uint8_t value);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int chroma_width() const noexcept { return (width_ + 1) / 2; }
    int chroma_height() const noexcept { return (height_ + 1) / 2; }
    bool has_chroma() const noexcept { return chroma_.has_value(); }

    std::uint8_t luma(int x, int y) const {
        return luma_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                     static_cast<std::size_t>(x)];
    }
    std::span<const std::uint8_t> luma() const noexcept { return luma_; }
    const std::optional<ChromaPlanes>& chroma() const noexcept { return chroma_; }

    /// Same chroma, new luma. Used by every luma-only processing stage.
    Frame with_luma(std::vector<std::uint8_t> luma) const;
    Frame with_luma(const FloatPlane& luma) const;

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> luma_;
    std::optional<ChromaPlanes> chroma_;
};

/// Ordered frames sharing geometry and chroma layout, plus the frame rate.
class Sequence {
public:
    Sequence(std::vector<Frame> frames, int fps_num = 30, int fps_den = 1);

    const std::vector<Frame>& frames() const noexcept { return frames_; }
    std::size_t size() const noexcept { return frames_.size(); }
    const Frame& operator[](std::size_t i) const { return frames_[i]; }
    int width() const noexcept { return frames_.front().width(); }
    int height() const noexcept { return frames_.front().height(); }
    bool has_chroma() const noexcept { return frames_.front().has_chroma(); }
    int fps_num() const noexcept { return fps_num_; }
    int fps_den() const noexcept { return fps_den_; }
    double duration_seconds() const noexcept {
        return static_cast<double>(frames_.size()) * fps_den_ / fps_num_;
    }

    friend bool operator==(const Sequence&, const Sequence&) = default;

private:
    std::vector<Frame> frames_;
    int fps_num_;
    int fps_den_;
};

FloatPlane luma_to_plane(const Frame& frame);

/// Round half away from zero, then clamp to [0, 255].
std::uint8_t quantize_sample(double value) noexcept;
std::vector<std::uint8_t> quantize_plane(const FloatPlane& plane);

}  // namespace adasharp
