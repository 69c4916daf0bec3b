#include "adasharp/cli.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "adasharp/bd_rate.hpp"
#include "adasharp/codec_harness.hpp"
#include "adasharp/error.hpp"
#include "adasharp/mask_pgm.hpp"
#include "adasharp/metrics.hpp"
#include "adasharp/pipeline.hpp"
#include "adasharp/sequence_ops.hpp"
#include "adasharp/y4m.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace adasharp {

namespace {

// Invalid flag values detected after CLI11 parsing; reported like parse errors.
class UsageError : public Error {
public:
    using Error::Error;
};

template <class Fn>
auto usage_checked(Fn&& fn) {
    try {
        return fn();
    } catch (const PreconditionError& e) {
        throw UsageError(e.what());
    }
}

void check_jobs(int jobs) {
    if (jobs < 1) {
        throw UsageError("--jobs must be >= 1");
    }
}

std::vector<PartitionMask> load_masks(const std::string& pattern, const Sequence& seq) {
    std::vector<PartitionMask> masks;
    masks.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const fs::path path = format_frame_pattern(pattern, i);
        if (!fs::exists(path)) {
            throw IoError("mask for frame " + std::to_string(i) + " missing: '" + path.string() +
                          "'");
        }
        masks.push_back(read_mask_pgm_file(path));
        require_mask_dimensions(masks.back(), seq.width(), seq.height());
    }
    return masks;
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::trunc);
    file << text;
    if (!file) {
        throw IoError("cannot write '" + path + "'");
    }
}

struct RdoFlags {
    double lambda = RdoParams{}.lambda_rdo;
    double leaf_bits = RdoParams{}.leaf_bits;
    double split_bits = RdoParams{}.split_bits;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "RDO Lagrange multiplier")->capture_default_str();
        cmd->add_option("--leaf-bits", leaf_bits, "Rate charged per CU leaf")
            ->capture_default_str();
        cmd->add_option("--split-bits", split_bits, "Rate charged per split flag")
            ->capture_default_str();
    }

    RdoParams params() const {
        RdoParams p{lambda, leaf_bits, split_bits};
        usage_checked([&] {
            p.validate();
            return 0;
        });
        return p;
    }
};

// ---- partition ----------------------------------------------------------

struct PartitionCmd {
    std::string input;
    std::string output = "mask_%05d.pgm";
    RdoFlags rdo;
    int jobs = 1;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("partition", "Compute per-frame CU partition masks");
        cmd->add_option("--input,-i", input, "Input Y4M")->required();
        cmd->add_option("--output,-o", output, "Mask path pattern with one %d conversion")
            ->capture_default_str();
        rdo.attach(cmd);
        cmd->add_option("--jobs,-j", jobs, "Worker threads")->capture_default_str();
    }

    int run(std::ostream& out) const {
        check_jobs(jobs);
        const RdoParams params = rdo.params();
        usage_checked([&] { return format_frame_pattern(output, 0); });
        const Sequence seq = read_y4m_file(input);
        const auto parts = partition_sequence(seq, params, jobs);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const fs::path path = format_frame_pattern(output, i);
            if (path.has_parent_path()) {
                fs::create_directories(path.parent_path());
            }
            write_mask_pgm_file(parts[i].mask, path);
            const auto& by = parts[i].leaves_by_size;
            out << "frame " << i << ": " << parts[i].leaf_count << " leaves (8x8 " << by[0]
                << ", 16x16 " << by[1] << ", 32x32 " << by[2] << ", 64x64 " << by[3] << ") -> "
                << path.string() << '\n';
        }
        return kExitOk;
    }
};

// ---- degrade / sharpen --------------------------------------------------

struct DegradeCmd {
    std::string input;
    std::string output;
    std::string masks;
    std::string mode = "direct";
    std::string alpha_table = AlphaTable{}.to_string();
    double tol = FixedPointOptions{}.tol;
    int max_iter = FixedPointOptions{}.max_iter;
    RdoFlags rdo;
    int jobs = 1;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("degrade", "Synthesize a low-quality sequence from GT");
        cmd->add_option("--input,-i", input, "Ground-truth Y4M")->required();
        cmd->add_option("--output,-o", output, "Output Y4M")->required();
        cmd->add_option("--masks", masks,
                        "Mask path pattern; partitions the input when omitted");
        cmd->add_option("--mode", mode, "direct or fixedpoint")
            ->check(CLI::IsMember({"direct", "fixedpoint"}))
            ->capture_default_str();
        cmd->add_option("--alpha-table", alpha_table, "Per-CU-size strengths, 8:a,16:b,32:c,64:d")
            ->capture_default_str();
        cmd->add_option("--tol", tol, "Fixed-point sup-norm tolerance")->capture_default_str();
        cmd->add_option("--max-iter", max_iter, "Fixed-point iteration cap")->capture_default_str();
        rdo.attach(cmd);
        cmd->add_option("--jobs,-j", jobs, "Worker threads")->capture_default_str();
    }

    int run(std::ostream& out) const {
        check_jobs(jobs);
        const AlphaTable table = usage_checked([&] { return AlphaTable::parse(alpha_table); });
        if (!(tol > 0.0) || max_iter < 1) {
            throw UsageError("--tol must be > 0 and --max-iter >= 1");
        }
        const RdoParams params = rdo.params();
        if (!masks.empty()) {
            usage_checked([&] { return format_frame_pattern(masks, 0); });
        }
        const Sequence gt = read_y4m_file(input);
        const auto mask_list =
            masks.empty() ? masks_of(partition_sequence(gt, params, jobs)) : load_masks(masks, gt);
        const SequenceResult r =
            degrade_sequence(gt, mask_list, table, mode == "fixedpoint", {tol, max_iter}, jobs);
        write_y4m_file(r.sequence, output);
        out << "mean alpha: " << r.mean_alpha << '\n';
        if (mode == "fixedpoint") {
            out << "max iterations: " << r.max_iterations << '\n';
        }
        return kExitOk;
    }
};

struct SharpenCmd {
    std::string input;
    std::string output;
    std::string masks;
    std::string alpha_table = AlphaTable{}.to_string();
    double smooth_sigma = 2.0;
    std::optional<double> uniform;
    double blur_sigma = 0.0;
    RdoFlags rdo;
    int jobs = 1;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("sharpen", "Apply partition-adaptive unsharp masking");
        cmd->add_option("--input,-i", input, "Input Y4M")->required();
        cmd->add_option("--output,-o", output, "Output Y4M")->required();
        cmd->add_option("--masks", masks,
                        "Mask path pattern; partitions the input when omitted");
        cmd->add_option("--alpha-table", alpha_table, "Per-CU-size strengths, 8:a,16:b,32:c,64:d")
            ->capture_default_str();
        cmd->add_option("--smooth-sigma", smooth_sigma, "Gaussian sigma for the alpha map")
            ->capture_default_str();
        cmd->add_option("--uniform", uniform, "Ignore masks and sharpen with this constant alpha");
        cmd->add_option("--blur-sigma", blur_sigma,
                        "USM blur sigma; 0 selects the 3x3 binomial kernel")
            ->capture_default_str();
        rdo.attach(cmd);
        cmd->add_option("--jobs,-j", jobs, "Worker threads")->capture_default_str();
    }

    int run(std::ostream& out) const {
        check_jobs(jobs);
        const AlphaTable table = usage_checked([&] { return AlphaTable::parse(alpha_table); });
        if (!std::isfinite(smooth_sigma) || smooth_sigma < 0.0 || !std::isfinite(blur_sigma) ||
            blur_sigma < 0.0) {
            throw UsageError("--smooth-sigma and --blur-sigma must be finite and >= 0");
        }
        if (uniform && (!std::isfinite(*uniform) || *uniform < 0.0)) {
            throw UsageError("--uniform must be finite and >= 0");
        }
        const RdoParams params = rdo.params();
        if (!masks.empty()) {
            usage_checked([&] { return format_frame_pattern(masks, 0); });
        }
        const UsmOptions usm{blur_sigma};
        const Sequence seq = read_y4m_file(input);
        SequenceResult r = [&] {
            if (uniform) {
                return usm_sequence(seq, *uniform, usm, jobs);
            }
            const auto mask_list = masks.empty() ? masks_of(partition_sequence(seq, params, jobs))
                                                 : load_masks(masks, seq);
            return sharpen_sequence(seq, mask_list, table, smooth_sigma, usm, jobs);
        }();
        write_y4m_file(r.sequence, output);
        out << "mean alpha: " << r.mean_alpha << '\n';
        return kExitOk;
    }
};

// ---- metrics ------------------------------------------------------------

struct MetricsCmd {
    std::string ref;
    std::string dist;
    std::string output;
    int jobs = 1;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("metrics", "PSNR, MS-SSIM and Charbonnier of two Y4Ms");
        cmd->add_option("--ref,-r", ref, "Reference Y4M")->required();
        cmd->add_option("--dist,-d", dist, "Distorted Y4M")->required();
        cmd->add_option("--output,-o", output, "JSON report path (stdout when omitted)");
        cmd->add_option("--jobs,-j", jobs, "Worker threads")->capture_default_str();
    }

    int run(std::ostream& out) const {
        check_jobs(jobs);
        const Sequence a = read_y4m_file(ref);
        const Sequence b = read_y4m_file(dist);
        write_text(to_json(evaluate_quality(a, b, jobs)).dump(2) + "\n", output, out);
        return kExitOk;
    }
};

// ---- rd-sweep -----------------------------------------------------------

struct SweepCmd {
    std::string input;
    std::string ref;
    std::string encoder = "h264";
    std::string encode_template;
    std::string decode_template;
    std::string preset = "medium";
    std::vector<int> crf = SweepOptions{}.crf_list;
    std::vector<std::string> metrics = {"psnr"};
    std::string workdir = "rd_sweep";
    int parallelism = 0;
    int jobs = 1;
    std::string scores;
    std::string score_metric = "external";

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("rd-sweep", "Encode a CRF ladder and build RD curves");
        cmd->add_option("--input,-i", input, "Y4M to encode")->required();
        cmd->add_option("--ref,-r", ref, "Reference Y4M for scoring (defaults to --input)");
        cmd->add_option("--encoder", encoder, "Built-in encoder (h264, h265) or a custom name")
            ->capture_default_str();
        cmd->add_option("--encode-template", encode_template,
                        "Command with {input} {output} {crf} {preset}");
        cmd->add_option("--decode-template", decode_template, "Command with {input} {output}");
        cmd->add_option("--preset", preset, "Encoder preset")->capture_default_str();
        cmd->add_option("--crf", crf, "Comma-separated CRF ladder")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--metrics", metrics, "Comma-separated metrics (psnr, ms_ssim)")
            ->delimiter(',')
            ->capture_default_str();
        cmd->add_option("--workdir,-w", workdir, "Sweep directory")->capture_default_str();
        cmd->add_option("--parallelism", parallelism, "Concurrent rungs; 0 runs all at once")
            ->capture_default_str();
        cmd->add_option("--jobs,-j", jobs, "Metric threads per rung")->capture_default_str();
        cmd->add_option("--scores", scores, "External crf,score CSV to attach as another curve");
        cmd->add_option("--score-metric", score_metric, "Metric name for --scores")
            ->capture_default_str();
    }

    EncoderSpec spec() const {
        EncoderSpec s;
        const auto names = builtin_encoder_names();
        if (std::find(names.begin(), names.end(), encoder) != names.end()) {
            s = builtin_encoder(encoder);
        } else {
            s.name = encoder;
            if (encode_template.empty() || decode_template.empty()) {
                throw UsageError("custom encoder '" + encoder +
                                 "' needs --encode-template and --decode-template");
            }
        }
        if (!encode_template.empty()) s.encode_template = encode_template;
        if (!decode_template.empty()) s.decode_template = decode_template;
        s.preset = preset;
        usage_checked([&] {
            s.validate();
            return 0;
        });
        return s;
    }

    int run(std::ostream& out) const {
        check_jobs(jobs);
        if (parallelism < 0) {
            throw UsageError("--parallelism must be >= 0");
        }
        for (const auto& m : metrics) {
            if (!is_rd_metric(m)) {
                throw UsageError("unknown metric '" + m + "' (use psnr or ms_ssim)");
            }
        }
        if (!scores.empty() && (score_metric.empty() || is_rd_metric(score_metric))) {
            throw UsageError("--score-metric must name a metric other than psnr and ms_ssim");
        }
        const EncoderSpec s = spec();
        SweepOptions opts;
        opts.crf_list = crf;
        opts.metrics = metrics;
        opts.parallelism = parallelism;
        opts.metric_jobs = jobs;
        const SweepResult r = rd_sweep(s, input, ref.empty() ? input : ref, workdir, opts);
        for (const auto& rung : r.rungs) {
            out << "crf " << rung.crf << ": " << format_number(rung.rate_kbps) << " kbps";
            for (const auto& [m, q] : rung.quality) {
                out << ", " << m << ' ' << format_number(q);
            }
            out << '\n';
        }
        for (const auto& w : r.warnings) {
            out << "warning: " << w << '\n';
        }
        if (!scores.empty()) {
            const RdCurve curve =
                import_external_scores(rd_skeleton(r, score_metric), scores, score_metric);
            const fs::path path = fs::path(workdir) / ("curve_" + score_metric + ".csv");
            write_rd_curve_csv_file(curve, path);
            out << "imported " << curve.size() << " scores -> " << path.string() << '\n';
        }
        return kExitOk;
    }
};

// ---- bdrate -------------------------------------------------------------

struct BdRateCmd {
    std::string anchor;
    std::string test;
    std::string output;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("bdrate", "Bjontegaard delta rate of two RD curve CSVs");
        cmd->add_option("--anchor,-a", anchor, "Anchor curve CSV")->required();
        cmd->add_option("--test,-t", test, "Test curve CSV")->required();
        cmd->add_option("--output,-o", output, "JSON result path (stdout when omitted)");
    }

    int run(std::ostream& out) const {
        const RdCurve a = read_rd_curve_csv_file(anchor);
        const RdCurve t = read_rd_curve_csv_file(test);
        const BdRateResult r = bd_rate(a, t);
        const json doc = {{"metric", r.metric},
                          {"bd_rate_percent", r.percent},
                          {"overlap_interval", {r.overlap_lo, r.overlap_hi}},
                          {"warnings", r.warnings}};
        write_text(doc.dump(2) + "\n", output, out);
        return kExitOk;
    }
};

// ---- pipeline -----------------------------------------------------------

struct PipelineCmd {
    std::string config;
    std::string input;
    std::string output_dir;
    std::optional<int> jobs;
    std::optional<int> parallelism;

    void attach(CLI::App& app) {
        CLI::App* cmd = app.add_subcommand("pipeline", "Run every stage from a JSON config");
        cmd->add_option("--config,-c", config, "Pipeline config JSON")->required();
        cmd->add_option("--input,-i", input, "Override the config's input");
        cmd->add_option("--output-dir,-o", output_dir, "Override the config's output_dir");
        cmd->add_option("--jobs,-j", jobs, "Override the config's jobs");
        cmd->add_option("--parallelism", parallelism, "Override the config's parallelism");
    }

    int run(std::ostream& out) const {
        PipelineConfig c = usage_checked([&] { return load_pipeline_config(config); });
        if (!input.empty()) c.input = input;
        if (!output_dir.empty()) c.output_dir = output_dir;
        if (jobs) c.jobs = *jobs;
        if (parallelism) c.parallelism = *parallelism;
        usage_checked([&] {
            c.validate();
            return 0;
        });
        run_pipeline(c, out);
        return kExitOk;
    }
};

bool maps_to_io(const std::exception& e) {
    return dynamic_cast<const IoError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
           dynamic_cast<const ImportError*>(&e) || dynamic_cast<const EnvironmentError*>(&e) ||
           dynamic_cast<const fs::filesystem_error*>(&e);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partition-adaptive sharpening and codec evaluation toolkit", "adasharp"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::simple);

    PartitionCmd partition;
    DegradeCmd degrade;
    SharpenCmd sharpen;
    MetricsCmd metrics;
    SweepCmd sweep;
    BdRateCmd bdrate;
    PipelineCmd pipeline;
    partition.attach(app);
    degrade.attach(app);
    sharpen.attach(app);
    metrics.attach(app);
    sweep.attach(app);
    bdrate.attach(app);
    pipeline.attach(app);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    try {
        if (name == "partition") return partition.run(out);
        if (name == "degrade") return degrade.run(out);
        if (name == "sharpen") return sharpen.run(out);
        if (name == "metrics") return metrics.run(out);
        if (name == "rd-sweep") return sweep.run(out);
        if (name == "bdrate") return bdrate.run(out);
        return pipeline.run(out);
    } catch (const UsageError& e) {
        err << "error: " << name << ": " << e.what() << "\n\n" << chosen->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << name << ": " << e.what() << '\n';
        return maps_to_io(e) ? kExitIo : kExitInternal;
    }
}

}  // namespace adasharp
