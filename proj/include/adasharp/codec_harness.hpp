#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adasharp/rd_curve.hpp"
#include "json.hpp"

namespace adasharp {

/// A command line with {name} placeholders. Tokens are split on whitespace
/// (double quotes group a token); placeholders may sit inside a token.
class CommandTemplate {
public:
    explicit CommandTemplate(std::string text);

    const std::string& text() const noexcept { return text_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    /// Occurrences of {name} across all tokens.
    int count(const std::string& placeholder) const;
    std::vector<std::string> placeholders() const;

    /// Substitutes every placeholder; throws PreconditionError for one
    /// missing from `values`.
    std::vector<std::string> expand(const std::map<std::string, std::string>& values) const;

private:
    std::string text_;
    std::vector<std::string> tokens_;
};

/// How to drive one external encoder/decoder pair.
struct EncoderSpec {
    std::string name;
    std::string encode_template;  ///< Needs {input} {output} {crf} {preset}, once each.
    std::string decode_template;  ///< Needs {input} {output}, once each.
    std::string preset = "medium";

    /// Throws PreconditionError when a template misses, repeats, or invents a
    /// placeholder.
    void validate() const;
};

/// ffmpeg-based H.264 ("h264", libx264) and H.265 ("h265", libx265) specs,
/// writing elementary streams and running the encoder single-threaded.
EncoderSpec builtin_encoder(const std::string& name);
std::vector<std::string> builtin_encoder_names();

nlohmann::json to_json(const EncoderSpec& spec);

struct EncodeResult {
    std::filesystem::path bitstream;
    std::filesystem::path log;
    std::uintmax_t bytes = 0;
    double rate_kbps = 0.0;
};

/// kbps from a byte count and a clip duration.
double rate_kbps(std::uintmax_t bytes, double duration_seconds);

/// Encodes `input` (Y4M) at one CRF into workdir/crf<NN>.bin, stderr going
/// to workdir/crf<NN>.encode.log. Rate = bits / (frames / fps) / 1000.
EncodeResult run_encode(const EncoderSpec& spec, const std::filesystem::path& input, int crf,
                        const std::filesystem::path& workdir);

/// Decodes a bitstream to Y4M via the spec's decode template.
void run_decode(const EncoderSpec& spec, const std::filesystem::path& bitstream,
                const std::filesystem::path& output, const std::filesystem::path& log);

struct SweepRung {
    int crf = 0;
    double rate_kbps = 0.0;
    std::uintmax_t bytes = 0;
    std::map<std::string, double> quality;
    std::filesystem::path bitstream;
    std::filesystem::path decoded;
};

struct SweepOptions {
    std::vector<int> crf_list = {21, 24, 27, 30, 33};
    std::vector<std::string> metrics = {"psnr"};
    int parallelism = 0;  ///< 0 means one worker per rung.
    int metric_jobs = 1;
};

struct SweepResult {
    std::vector<SweepRung> rungs;  ///< Ascending CRF.
    std::vector<RdCurve> curves;   ///< One per metric, in request order.
    std::vector<std::string> warnings;
};

/// Encodes, decodes and scores every rung against `ref`, then writes
/// curve_<metric>.csv files and manifest.json into `workdir`. A failing rung
/// stops the remaining ones, leaves a manifest marked "partial" and raises
/// SweepError naming the CRF.
SweepResult rd_sweep(const EncoderSpec& spec, const std::filesystem::path& input,
                     const std::filesystem::path& ref, const std::filesystem::path& workdir,
                     const SweepOptions& options = {});

/// Rate-only curve (quality NaN) with the CRF of every rung, ready for
/// import_external_scores.
RdCurve rd_skeleton(const SweepResult& sweep, const std::string& metric);

/// Attaches scores from a "crf,score" CSV to the skeleton's rungs. Every rung
/// needs exactly one row and no unknown CRFs are allowed.
RdCurve import_external_scores(const RdCurve& skeleton, const std::filesystem::path& csv,
                               const std::string& metric);

}  // namespace adasharp
