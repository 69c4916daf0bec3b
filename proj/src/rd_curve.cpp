#include "adasharp/rd_curve.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "adasharp/error.hpp"

namespace adasharp {

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
        if (comma == std::string_view::npos) {
            return fields;
        }
        pos = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <class T>
T parse_field(std::string_view text, std::size_t line_no, const char* what) {
    text = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw FormatError("CSV line " + std::to_string(line_no) + ": invalid " + what + " '" +
                          std::string(text) + "'");
    }
    return value;
}

}  // namespace

RdCurve::RdCurve(std::string metric, std::vector<RdPoint> points)
    : metric_(std::move(metric)), points_(std::move(points)) {
    for (const RdPoint& p : points_) {
        if (!std::isfinite(p.rate_kbps) || p.rate_kbps <= 0.0) {
            throw PreconditionError("RD point rates must be finite and positive, got " +
                                    format_number(p.rate_kbps));
        }
    }
    std::sort(points_.begin(), points_.end(),
              [](const RdPoint& a, const RdPoint& b) { return a.rate_kbps < b.rate_kbps; });
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].rate_kbps == points_[i - 1].rate_kbps) {
            throw PreconditionError("RD curve has duplicate rate " +
                                    format_number(points_[i].rate_kbps));
        }
    }
}

bool RdCurve::quality_monotone() const {
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].quality < points_[i - 1].quality) {
            return false;
        }
    }
    return true;
}

RdCurve read_rd_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("RD curve CSV is empty");
    }
    const auto header = split_csv(trim(line));
    if (header.size() != 3 || trim(header[0]) != "crf" || trim(header[1]) != "rate_kbps" ||
        trim(header[2]).empty()) {
        throw FormatError("RD curve CSV header must be 'crf,rate_kbps,<metric>', got '" + line +
                          "'");
    }
    std::string metric(trim(header[2]));
    std::vector<RdPoint> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 3) {
            throw FormatError("CSV line " + std::to_string(line_no) + ": expected 3 fields");
        }
        RdPoint p;
        p.crf = parse_field<int>(fields[0], line_no, "crf");
        p.rate_kbps = parse_field<double>(fields[1], line_no, "rate");
        p.quality = parse_field<double>(fields[2], line_no, "quality");
        points.push_back(p);
    }
    return RdCurve(std::move(metric), std::move(points));
}

void write_rd_curve_csv(const RdCurve& curve, std::ostream& out) {
    out << "crf,rate_kbps," << curve.metric() << '\n';
    for (const RdPoint& p : curve.points()) {
        out << (p.crf ? std::to_string(*p.crf) : std::string()) << ',' << format_number(p.rate_kbps)
            << ',' << format_number(p.quality) << '\n';
    }
    if (!out) {
        throw IoError("failed writing RD curve CSV");
    }
}

RdCurve read_rd_curve_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open RD curve '" + path.string() + "'");
    }
    try {
        return read_rd_curve_csv(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_rd_curve_csv_file(const RdCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    write_rd_curve_csv(curve, out);
}

std::string format_number(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace adasharp
