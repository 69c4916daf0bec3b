#include "adasharp/y4m.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "adasharp/error.hpp"

namespace adasharp {

namespace {

constexpr std::string_view kMagic = "YUV4MPEG2";
constexpr std::string_view kFrameTag = "FRAME";
constexpr std::size_t kMaxHeaderLength = 4096;

struct Header {
    int width = -1;
    int height = -1;
    int fps_num = 30;
    int fps_den = 1;
    bool has_chroma = true;
};

int parse_positive(std::string_view text, std::string_view what, std::size_t offset) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || value <= 0) {
        throw FormatError("invalid " + std::string(what) + " '" + std::string(text) +
                          "' at byte offset " + std::to_string(offset));
    }
    return value;
}

// Tracks the byte offset so errors can point at the offending position.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::size_t offset() const noexcept { return offset_; }

    // Reads up to and including '\n'; returns false on clean EOF before any byte.
    bool read_line(std::string& line, std::size_t limit) {
        line.clear();
        char c = 0;
        while (in_.get(c)) {
            ++offset_;
            if (c == '\n') {
                return true;
            }
            line.push_back(c);
            if (line.size() > limit) {
                throw FormatError("header line exceeds " + std::to_string(limit) +
                                  " bytes at byte offset " + std::to_string(offset_));
            }
        }
        if (line.empty()) {
            return false;
        }
        throw TruncationError("unterminated line at byte offset " + std::to_string(offset_));
    }

    std::size_t read_bytes(std::uint8_t* dst, std::size_t n) {
        in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        const auto got = static_cast<std::size_t>(in_.gcount());
        offset_ += got;
        return got;
    }

    std::size_t skip_bytes(std::size_t n) {
        in_.ignore(static_cast<std::streamsize>(n));
        const auto got = static_cast<std::size_t>(in_.gcount());
        offset_ += got;
        return got;
    }

private:
    std::istream& in_;
    std::size_t offset_ = 0;
};

Header parse_header(Reader& reader) {
    std::string line;
    if (!reader.read_line(line, kMaxHeaderLength)) {
        throw FormatError("empty stream: missing YUV4MPEG2 magic at byte offset 0");
    }
    for (std::size_t i = 0; i < kMagic.size(); ++i) {
        if (i >= line.size() || line[i] != kMagic[i]) {
            throw FormatError("bad YUV4MPEG2 magic at byte offset " + std::to_string(i));
        }
    }
    if (line.size() > kMagic.size() && line[kMagic.size()] != ' ') {
        throw FormatError("bad YUV4MPEG2 magic at byte offset " + std::to_string(kMagic.size()));
    }

    Header h;
    std::size_t pos = kMagic.size();
    while (pos < line.size()) {
        if (line[pos] == ' ') {
            ++pos;
            continue;
        }
        const std::size_t end = std::min(line.find(' ', pos), line.size());
        const std::string_view token(line.data() + pos, end - pos);
        const std::string_view value = token.substr(1);
        switch (token.front()) {
            case 'W':
                h.width = parse_positive(value, "width", pos);
                break;
            case 'H':
                h.height = parse_positive(value, "height", pos);
                break;
            case 'F': {
                const auto colon = value.find(':');
                if (colon == std::string_view::npos) {
                    throw FormatError("invalid frame rate '" + std::string(token) +
                                      "' at byte offset " + std::to_string(pos));
                }
                h.fps_num = parse_positive(value.substr(0, colon), "frame rate numerator", pos);
                h.fps_den = parse_positive(value.substr(colon + 1), "frame rate denominator", pos);
                break;
            }
            case 'I':
                if (value != "p") {
                    throw UnsupportedFormatError("unsupported interlacing '" + std::string(token) +
                                                 "': only progressive (Ip) input is accepted");
                }
                break;
            case 'C':
                if (value == "420" || value == "420jpeg" || value == "420mpeg2" ||
                    value == "420paldv") {
                    h.has_chroma = true;
                } else if (value == "mono") {
                    h.has_chroma = false;
                } else {
                    throw UnsupportedFormatError("unsupported colorspace '" + std::string(token) +
                                                 "': only 8-bit 4:2:0 and mono are accepted");
                }
                break;
            default:
                // A (aspect), X (extensions) and unknown tags carry nothing we use.
                break;
        }
        pos = end;
    }
    if (h.width < 0 || h.height < 0) {
        throw FormatError("YUV4MPEG2 header lacks W or H tag");
    }
    if (h.has_chroma && (h.width % 2 != 0 || h.height % 2 != 0)) {
        throw UnsupportedFormatError("4:2:0 input with odd dimensions " +
                                     std::to_string(h.width) + "x" + std::to_string(h.height) +
                                     " is not supported");
    }
    return h;
}

// Consumes a FRAME marker line; returns false at clean end of stream.
bool next_frame_marker(Reader& reader, std::size_t frame_index) {
    const std::size_t start = reader.offset();
    std::string line;
    bool got = false;
    try {
        got = reader.read_line(line, kMaxHeaderLength);
    } catch (const TruncationError&) {
        throw TruncationError("truncated FRAME marker for frame " + std::to_string(frame_index) +
                              " at byte offset " + std::to_string(start));
    }
    if (!got) {
        return false;
    }
    if (line.compare(0, kFrameTag.size(), kFrameTag) != 0 ||
        (line.size() > kFrameTag.size() && line[kFrameTag.size()] != ' ')) {
        throw FormatError("expected FRAME marker for frame " + std::to_string(frame_index) +
                          " at byte offset " + std::to_string(start));
    }
    return true;
}

std::size_t payload_size(const Header& h) {
    const auto luma = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
    if (!h.has_chroma) {
        return luma;
    }
    const auto c = static_cast<std::size_t>((h.width + 1) / 2) *
                   static_cast<std::size_t>((h.height + 1) / 2);
    return luma + 2 * c;
}

[[noreturn]] void throw_truncated(std::size_t frame_index, std::size_t got, std::size_t want) {
    throw TruncationError("truncated payload in frame " + std::to_string(frame_index) + ": got " +
                          std::to_string(got) + " of " + std::to_string(want) + " bytes");
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

template <class Fn>
auto with_path_context(const std::filesystem::path& path, Fn&& fn) {
    try {
        return fn();
    } catch (const TruncationError& e) {
        throw TruncationError(path.string() + ": " + e.what());
    } catch (const UnsupportedFormatError& e) {
        throw UnsupportedFormatError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace

Sequence read_y4m(std::istream& in) {
    Reader reader(in);
    const Header h = parse_header(reader);
    const auto luma_size = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
    const auto chroma_size = static_cast<std::size_t>((h.width + 1) / 2) *
                             static_cast<std::size_t>((h.height + 1) / 2);
    const std::size_t want = payload_size(h);

    std::vector<Frame> frames;
    while (next_frame_marker(reader, frames.size())) {
        std::vector<std::uint8_t> luma(luma_size);
        std::size_t got = reader.read_bytes(luma.data(), luma_size);
        if (got != luma_size) {
            throw_truncated(frames.size(), got, want);
        }
        std::optional<ChromaPlanes> chroma;
        if (h.has_chroma) {
            ChromaPlanes planes{std::vector<std::uint8_t>(chroma_size),
                                std::vector<std::uint8_t>(chroma_size)};
            got += reader.read_bytes(planes.cb.data(), chroma_size);
            got += reader.read_bytes(planes.cr.data(), chroma_size);
            if (got != want) {
                throw_truncated(frames.size(), got, want);
            }
            chroma = std::move(planes);
        }
        frames.emplace_back(h.width, h.height, std::move(luma), std::move(chroma));
    }
    if (frames.empty()) {
        throw FormatError("YUV4MPEG2 stream contains no frames");
    }
    return Sequence(std::move(frames), h.fps_num, h.fps_den);
}

void write_y4m(const Sequence& seq, std::ostream& out) {
    out << kMagic << " W" << seq.width() << " H" << seq.height() << " F" << seq.fps_num() << ':'
        << seq.fps_den() << " Ip A1:1 " << (seq.has_chroma() ? "C420jpeg" : "Cmono") << '\n';
    for (const Frame& f : seq.frames()) {
        out << kFrameTag << '\n';
        const auto luma = f.luma();
        out.write(reinterpret_cast<const char*>(luma.data()),
                  static_cast<std::streamsize>(luma.size()));
        if (f.chroma()) {
            const auto& c = *f.chroma();
            out.write(reinterpret_cast<const char*>(c.cb.data()),
                      static_cast<std::streamsize>(c.cb.size()));
            out.write(reinterpret_cast<const char*>(c.cr.data()),
                      static_cast<std::streamsize>(c.cr.size()));
        }
    }
    if (!out) {
        throw IoError("failed writing YUV4MPEG2 stream");
    }
}

Sequence read_y4m_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return with_path_context(path, [&] { return read_y4m(in); });
}

void write_y4m_file(const Sequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    write_y4m(seq, out);
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

Y4mInfo probe_y4m_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return with_path_context(path, [&] {
        Reader reader(in);
        const Header h = parse_header(reader);
        const std::size_t want = payload_size(h);
        Y4mInfo info{h.width, h.height, h.fps_num, h.fps_den, h.has_chroma, 0};
        while (next_frame_marker(reader, info.frame_count)) {
            const std::size_t got = reader.skip_bytes(want);
            if (got != want) {
                throw_truncated(info.frame_count, got, want);
            }
            ++info.frame_count;
        }
        if (info.frame_count == 0) {
            throw FormatError("YUV4MPEG2 stream contains no frames");
        }
        return info;
    });
}

}  // namespace adasharp
