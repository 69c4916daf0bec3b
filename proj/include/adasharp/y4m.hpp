#pragma once

#include <filesystem>
#include <iosfwd>

#include "adasharp/frame.hpp"

namespace adasharp {

/// Parses a YUV4MPEG2 stream. Accepts 8-bit 4:2:0 (C420, C420jpeg, C420mpeg2,
/// C420paldv, or no C tag) and Cmono, progressive only. Frame rate defaults to
/// 30:1 when the F tag is absent.
Sequence read_y4m(std::istream& in);

/// Writes the canonical header "YUV4MPEG2 W<w> H<h> F<n>:<d> Ip A1:1 C420jpeg"
/// (Cmono for luma-only sequences) followed by FRAME records.
void write_y4m(const Sequence& seq, std::ostream& out);

Sequence read_y4m_file(const std::filesystem::path& path);
void write_y4m_file(const Sequence& seq, const std::filesystem::path& path);

/// Header facts plus frame count, gathered without keeping pixel data.
struct Y4mInfo {
    int width = 0;
    int height = 0;
    int fps_num = 30;
    int fps_den = 1;
    bool has_chroma = true;
    std::size_t frame_count = 0;

    double duration_seconds() const noexcept {
        return static_cast<double>(frame_count) * fps_den / fps_num;
    }
};

Y4mInfo probe_y4m_file(const std::filesystem::path& path);

}  // namespace adasharp
