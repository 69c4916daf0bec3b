#include "adasharp/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adasharp/error.hpp"

namespace adasharp {

namespace {

std::size_t area(int w, int h) {
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
}

}  // namespace

FloatPlane::FloatPlane(int width, int height, double fill)
    : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw PreconditionError("FloatPlane dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
    }
    values_.assign(area(width, height), fill);
}

FloatPlane::FloatPlane(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width <= 0 || height <= 0) {
        throw PreconditionError("FloatPlane dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
    }
    if (values_.size() != area(width, height)) {
        throw PreconditionError("FloatPlane value count " + std::to_string(values_.size()) +
                                " does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
    }
}

double FloatPlane::clamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return values_[index(x, y)];
}

double FloatPlane::min() const { return *std::min_element(values_.begin(), values_.end()); }

double FloatPlane::max() const { return *std::max_element(values_.begin(), values_.end()); }

double FloatPlane::mean() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0) /
           static_cast<double>(values_.size());
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> luma,
             std::optional<ChromaPlanes> chroma)
    : width_(width), height_(height), luma_(std::move(luma)), chroma_(std::move(chroma)) {
    if (width <= 0 || height <= 0) {
        throw PreconditionError("frame dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
    }
    if (luma_.size() != area(width, height)) {
        throw PreconditionError("luma length " + std::to_string(luma_.size()) +
                                " does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
    }
    if (chroma_) {
        if (width % 2 != 0 || height % 2 != 0) {
            throw PreconditionError("4:2:0 frames need even dimensions, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
        }
        const auto expected = area(chroma_width(), chroma_height());
        if (chroma_->cb.size() != expected || chroma_->cr.size() != expected) {
            throw PreconditionError("chroma plane length does not match " +
                                    std::to_string(chroma_width()) + "x" +
                                    std::to_string(chroma_height()));
        }
    }
}

Frame Frame::filled(int width, int height, std::uint8_t value) {
    return Frame(width, height, std::vector<std::uint8_t>(area(std::max(width, 0), std::max(height, 0)), value));
}

Frame Frame::with_luma(std::vector<std::uint8_t> luma) const {
    return Frame(width_, height_, std::move(luma), chroma_);
}

Frame Frame::with_luma(const FloatPlane& luma) const {
    if (luma.width() != width_ || luma.height() != height_) {
        throw DimensionError("luma plane " + std::to_string(luma.width()) + "x" +
                             std::to_string(luma.height()) + " does not match frame " +
                             std::to_string(width_) + "x" + std::to_string(height_));
    }
    return with_luma(quantize_plane(luma));
}

Sequence::Sequence(std::vector<Frame> frames, int fps_num, int fps_den)
    : frames_(std::move(frames)), fps_num_(fps_num), fps_den_(fps_den) {
    if (frames_.empty()) {
        throw PreconditionError("sequence must contain at least one frame");
    }
    if (fps_num <= 0 || fps_den <= 0) {
        throw PreconditionError("frame rate must be positive, got " + std::to_string(fps_num) +
                                ":" + std::to_string(fps_den));
    }
    const Frame& first = frames_.front();
    for (std::size_t i = 1; i < frames_.size(); ++i) {
        const Frame& f = frames_[i];
        if (f.width() != first.width() || f.height() != first.height() ||
            f.has_chroma() != first.has_chroma()) {
            throw DimensionError("frame " + std::to_string(i) +
                                 " differs in geometry or chroma layout from frame 0");
        }
    }
}

FloatPlane luma_to_plane(const Frame& frame) {
    const auto luma = frame.luma();
    return FloatPlane(frame.width(), frame.height(),
                      std::vector<double>(luma.begin(), luma.end()));
}

std::uint8_t quantize_sample(double value) noexcept {
    if (std::isnan(value)) {
        return 0;
    }
    return static_cast<std::uint8_t>(std::clamp(std::round(value), 0.0, 255.0));
}

std::vector<std::uint8_t> quantize_plane(const FloatPlane& plane) {
    std::vector<std::uint8_t> out(plane.size());
    std::transform(plane.values().begin(), plane.values().end(), out.begin(), quantize_sample);
    return out;
}

}  // namespace adasharp
