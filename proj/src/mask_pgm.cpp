#include "adasharp/mask_pgm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "adasharp/error.hpp"

namespace adasharp {

namespace {

// Reads one whitespace-delimited header integer, skipping '#' comments.
int read_header_int(std::istream& in, const char* what) {
    int c = in.peek();
    while (c != EOF) {
        if (c == '#') {
            std::string discard;
            std::getline(in, discard);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
        c = in.peek();
    }
    int value = 0;
    bool any = false;
    while ((c = in.peek()) != EOF && std::isdigit(c)) {
        value = value * 10 + (in.get() - '0');
        any = true;
        if (value > 1 << 20) {
            throw FormatError(std::string("PGM ") + what + " out of range");
        }
    }
    if (!any) {
        throw FormatError(std::string("PGM header: missing ") + what);
    }
    return value;
}

}  // namespace

PartitionMask read_mask_pgm(std::istream& in) {
    char magic[2] = {};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5') {
        throw FormatError("not a binary PGM: expected magic P5 at byte offset 0");
    }
    const int width = read_header_int(in, "width");
    const int height = read_header_int(in, "height");
    const int maxval = read_header_int(in, "maxval");
    if (maxval != 255) {
        throw UnsupportedFormatError("PGM maxval must be 255, got " + std::to_string(maxval));
    }
    if (width <= 0 || height <= 0) {
        throw FormatError("PGM dimensions must be positive");
    }
    // Exactly one whitespace byte separates the header from the raster.
    if (!std::isspace(in.get())) {
        throw FormatError("PGM header not terminated by whitespace");
    }
    std::vector<std::uint8_t> raster(static_cast<std::size_t>(width) *
                                     static_cast<std::size_t>(height));
    in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (static_cast<std::size_t>(in.gcount()) != raster.size()) {
        throw TruncationError("PGM raster truncated: got " + std::to_string(in.gcount()) + " of " +
                              std::to_string(raster.size()) + " bytes");
    }
    return PartitionMask(width, height, std::move(raster));
}

void write_mask_pgm(const PartitionMask& mask, std::ostream& out) {
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    const auto v = mask.values();
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size()));
    if (!out) {
        throw IoError("failed writing PGM mask");
    }
}

PartitionMask read_mask_pgm_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open mask '" + path.string() + "' for reading");
    }
    try {
        return read_mask_pgm(in);
    } catch (const InvalidMaskError& e) {
        throw InvalidMaskError(path.string() + ": " + e.what());
    } catch (const TruncationError& e) {
        throw TruncationError(path.string() + ": " + e.what());
    } catch (const UnsupportedFormatError& e) {
        throw UnsupportedFormatError(path.string() + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_mask_pgm_file(const PartitionMask& mask, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open mask '" + path.string() + "' for writing");
    }
    write_mask_pgm(mask, out);
}

void require_mask_dimensions(const PartitionMask& mask, int width, int height) {
    if (mask.width() != width || mask.height() != height) {
        throw DimensionError("mask is " + std::to_string(mask.width()) + "x" +
                             std::to_string(mask.height()) + " but frame is " +
                             std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace adasharp
