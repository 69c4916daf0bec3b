#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "adasharp/alpha_table.hpp"
#include "adasharp/codec_harness.hpp"
#include "adasharp/ctu_partition.hpp"
#include "json.hpp"

namespace adasharp {

enum class DegradeMode { none, direct, fixedpoint };

DegradeMode parse_degrade_mode(const std::string& text);
std::string to_string(DegradeMode mode);

/// Everything the one-shot pipeline needs. Loaded from JSON with strict key
/// checking; CLI flags override individual fields afterwards.
struct PipelineConfig {
    std::filesystem::path input;
    std::filesystem::path output_dir = "adasharp_out";
    RdoParams rdo;
    AlphaTable alpha_table;
    double smooth_sigma = 2.0;
    DegradeMode degrade_mode = DegradeMode::direct;
    EncoderSpec encoder = builtin_encoder("h264");
    std::vector<int> crf_list = {21, 24, 27, 30, 33};
    std::vector<std::string> metrics = {"psnr", "ms_ssim"};
    std::vector<double> usm_strengths = {1.5, 3.0};
    int parallelism = 0;
    int jobs = 1;

    /// Re-checks every module-level invariant; throws PreconditionError.
    void validate() const;
};

/// Throws PreconditionError on unknown keys or wrong types. Value checks are
/// left to PipelineConfig::validate so CLI overrides can be applied first.
PipelineConfig parse_pipeline_config(const nlohmann::json& doc);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

/// Runs partition -> degrade -> sharpen (anchor, uniform USM, adaptive) ->
/// RD sweep per condition -> BD-Rate against the anchor, writing every
/// artifact plus report.json and rd_plot.svg under config.output_dir.
/// Progress lines go to `log`. Errors carry a "<stage>: " prefix.
nlohmann::json run_pipeline(const PipelineConfig& config, std::ostream& log);

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  ///< (rate_kbps, quality)
};

/// Static SVG line chart of rate-quality curves.
std::string render_rd_plot_svg(const std::vector<PlotSeries>& series, const std::string& metric);

/// Expands a printf-style pattern holding exactly one integer conversion
/// (%d, %5d, %05d; "%%" is a literal percent). Throws PreconditionError for
/// any other pattern.
std::string format_frame_pattern(const std::string& pattern, std::size_t index);

}  // namespace adasharp
