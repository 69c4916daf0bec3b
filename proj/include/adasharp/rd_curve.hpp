#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adasharp {

struct RdPoint {
    double rate_kbps = 0.0;
    double quality = 0.0;  ///< Higher is better.
    std::optional<int> crf;

    friend bool operator==(const RdPoint&, const RdPoint&) = default;
};

/// Rate-quality samples of one metric, kept sorted strictly increasing in rate.
class RdCurve {
public:
    RdCurve(std::string metric, std::vector<RdPoint> points);

    const std::string& metric() const noexcept { return metric_; }
    const std::vector<RdPoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

    /// True when quality never drops as rate grows.
    bool quality_monotone() const;

    friend bool operator==(const RdCurve&, const RdCurve&) = default;

private:
    std::string metric_;
    std::vector<RdPoint> points_;
};

/// CSV with header "crf,rate_kbps,<metric>". Every row needs a CRF.
RdCurve read_rd_curve_csv(std::istream& in);
void write_rd_curve_csv(const RdCurve& curve, std::ostream& out);

RdCurve read_rd_curve_csv_file(const std::filesystem::path& path);
void write_rd_curve_csv_file(const RdCurve& curve, const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace adasharp
