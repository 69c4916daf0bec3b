#include "adasharp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "adasharp/bd_rate.hpp"
#include "adasharp/error.hpp"
#include "adasharp/mask_pgm.hpp"
#include "adasharp/metrics.hpp"
#include "adasharp/sequence_ops.hpp"
#include "adasharp/y4m.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace adasharp {

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!obj.is_object()) {
        throw PreconditionError(where + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw PreconditionError("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw PreconditionError("bad value for '" + key + "' in " + where + ": " + e.what());
    }
}

// Runs fn, prefixing any library error with the stage name.
template <class Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const IoError& e) {
        throw IoError(std::string(name) + ": " + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError(std::string(name) + ": " + e.what());
    } catch (const EnvironmentError& e) {
        throw EnvironmentError(std::string(name) + ": " + e.what());
    } catch (const Error& e) {
        throw Error(std::string(name) + ": " + e.what());
    }
}

json curve_json(const RdCurve& curve) {
    json pts = json::array();
    for (const auto& p : curve.points()) {
        pts.push_back({{"crf", p.crf ? json(*p.crf) : json(nullptr)},
                       {"rate_kbps", p.rate_kbps},
                       {"quality", std::isfinite(p.quality) ? json(p.quality)
                                                            : json(format_number(p.quality))}});
    }
    return {{"metric", curve.metric()}, {"points", pts}};
}

std::string condition_name(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "usm_%g", alpha);
    return buf;
}

void write_masks(const std::vector<PartitionMask>& masks, const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < masks.size(); ++i) {
        write_mask_pgm_file(masks[i], dir / format_frame_pattern("mask_%05d.pgm", i));
    }
}

}  // namespace

DegradeMode parse_degrade_mode(const std::string& text) {
    if (text == "none") return DegradeMode::none;
    if (text == "direct") return DegradeMode::direct;
    if (text == "fixedpoint") return DegradeMode::fixedpoint;
    throw PreconditionError("degrade mode must be none, direct or fixedpoint, got '" + text + "'");
}

std::string to_string(DegradeMode mode) {
    switch (mode) {
        case DegradeMode::none:
            return "none";
        case DegradeMode::direct:
            return "direct";
        case DegradeMode::fixedpoint:
            return "fixedpoint";
    }
    return "direct";
}

void PipelineConfig::validate() const {
    if (input.empty()) {
        throw PreconditionError("pipeline config needs an input path");
    }
    if (output_dir.empty()) {
        throw PreconditionError("pipeline config needs an output_dir");
    }
    rdo.validate();
    if (!std::isfinite(smooth_sigma) || smooth_sigma < 0.0) {
        throw PreconditionError("smooth_sigma must be finite and >= 0");
    }
    encoder.validate();
    if (crf_list.empty()) {
        throw ArityError("crf_list must not be empty");
    }
    std::vector<int> sorted = crf_list;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw PreconditionError("crf_list contains duplicates");
    }
    if (metrics.empty()) {
        throw ArityError("metrics must not be empty");
    }
    for (const auto& m : metrics) {
        if (!is_rd_metric(m)) {
            throw PreconditionError("metric '" + m + "' is not an RD metric (psnr, ms_ssim)");
        }
    }
    for (double a : usm_strengths) {
        if (!std::isfinite(a) || a < 0.0) {
            throw PreconditionError("usm_strengths must be finite and >= 0");
        }
    }
    if (parallelism < 0 || jobs < 1) {
        throw PreconditionError("parallelism must be >= 0 and jobs >= 1");
    }
}

PipelineConfig parse_pipeline_config(const json& doc) {
    const std::string where = "pipeline config";
    reject_unknown_keys(doc,
                        {"input", "output_dir", "rdo", "alpha_table", "smooth_sigma",
                         "degrade_mode", "encoder", "crf_list", "metrics", "usm_strengths",
                         "parallelism", "jobs"},
                        where);
    PipelineConfig c;
    if (doc.contains("input")) c.input = get_as<std::string>(doc, "input", where);
    if (doc.contains("output_dir")) c.output_dir = get_as<std::string>(doc, "output_dir", where);
    if (doc.contains("rdo")) {
        const json& r = doc.at("rdo");
        reject_unknown_keys(r, {"lambda", "leaf_bits", "split_bits"}, "rdo");
        if (r.contains("lambda")) c.rdo.lambda_rdo = get_as<double>(r, "lambda", "rdo");
        if (r.contains("leaf_bits")) c.rdo.leaf_bits = get_as<double>(r, "leaf_bits", "rdo");
        if (r.contains("split_bits")) c.rdo.split_bits = get_as<double>(r, "split_bits", "rdo");
    }
    if (doc.contains("alpha_table")) {
        c.alpha_table = AlphaTable::parse(get_as<std::string>(doc, "alpha_table", where));
    }
    if (doc.contains("smooth_sigma")) c.smooth_sigma = get_as<double>(doc, "smooth_sigma", where);
    if (doc.contains("degrade_mode")) {
        c.degrade_mode = parse_degrade_mode(get_as<std::string>(doc, "degrade_mode", where));
    }
    if (doc.contains("encoder")) {
        const json& e = doc.at("encoder");
        reject_unknown_keys(e, {"name", "encode_template", "decode_template", "preset"}, "encoder");
        const std::string name = e.contains("name") ? get_as<std::string>(e, "name", "encoder")
                                                    : std::string("h264");
        const auto builtins = builtin_encoder_names();
        if (std::find(builtins.begin(), builtins.end(), name) != builtins.end()) {
            c.encoder = builtin_encoder(name);
        } else {
            c.encoder = EncoderSpec{name, "", "", "medium"};
        }
        if (e.contains("encode_template")) {
            c.encoder.encode_template = get_as<std::string>(e, "encode_template", "encoder");
        }
        if (e.contains("decode_template")) {
            c.encoder.decode_template = get_as<std::string>(e, "decode_template", "encoder");
        }
        if (e.contains("preset")) c.encoder.preset = get_as<std::string>(e, "preset", "encoder");
    }
    if (doc.contains("crf_list")) c.crf_list = get_as<std::vector<int>>(doc, "crf_list", where);
    if (doc.contains("metrics")) c.metrics = get_as<std::vector<std::string>>(doc, "metrics", where);
    if (doc.contains("usm_strengths")) {
        c.usm_strengths = get_as<std::vector<double>>(doc, "usm_strengths", where);
    }
    if (doc.contains("parallelism")) c.parallelism = get_as<int>(doc, "parallelism", where);
    if (doc.contains("jobs")) c.jobs = get_as<int>(doc, "jobs", where);
    return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": invalid JSON: " + e.what());
    }
    return parse_pipeline_config(doc);
}

json to_json(const PipelineConfig& c) {
    return {{"input", c.input.string()},
            {"output_dir", c.output_dir.string()},
            {"rdo",
             {{"lambda", c.rdo.lambda_rdo},
              {"leaf_bits", c.rdo.leaf_bits},
              {"split_bits", c.rdo.split_bits}}},
            {"alpha_table", c.alpha_table.to_string()},
            {"smooth_sigma", c.smooth_sigma},
            {"degrade_mode", to_string(c.degrade_mode)},
            {"encoder", to_json(c.encoder)},
            {"crf_list", c.crf_list},
            {"metrics", c.metrics},
            {"usm_strengths", c.usm_strengths},
            {"parallelism", c.parallelism},
            {"jobs", c.jobs}};
}

json run_pipeline(const PipelineConfig& config, std::ostream& log) {
    stage("config", [&] {
        config.validate();
        return 0;
    });
    const fs::path out = config.output_dir;
    stage("setup", [&] {
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) {
            throw IoError("cannot create '" + out.string() + "': " + ec.message());
        }
        return 0;
    });

    json report = {{"config", to_json(config)}};
    const Sequence source = stage("read", [&] { return read_y4m_file(config.input); });
    log << "read " << source.size() << " frames " << source.width() << "x" << source.height()
        << " from " << config.input.string() << '\n';

    // Degradation: the source is ground truth and LQ is derived from it.
    fs::path reference_path = config.input;
    Sequence lq = source;
    if (config.degrade_mode != DegradeMode::none) {
        lq = stage("degrade", [&] {
            const auto parts = partition_sequence(source, config.rdo, config.jobs);
            const auto masks = masks_of(parts);
            write_masks(masks, out / "masks_gt");
            SequenceResult r = degrade_sequence(source, masks, config.alpha_table,
                                                config.degrade_mode == DegradeMode::fixedpoint,
                                                {}, config.jobs);
            write_y4m_file(r.sequence, out / "lq.y4m");
            report["degrade"] = {{"mode", to_string(config.degrade_mode)},
                                 {"mean_alpha", r.mean_alpha},
                                 {"masks", "masks_gt"},
                                 {"output", "lq.y4m"}};
            log << "degrade: mode " << to_string(config.degrade_mode) << ", mean alpha "
                << r.mean_alpha << '\n';
            return r.sequence;
        });
    }

    // Sharpening conditions, all computed from the LQ input.
    struct Condition {
        std::string name;
        Sequence sequence;
        double mean_alpha;
    };
    std::vector<Condition> conditions;
    stage("sharpen", [&] {
        const auto parts = partition_sequence(lq, config.rdo, config.jobs);
        const auto masks = masks_of(parts);
        write_masks(masks, out / "masks_lq");
        std::array<std::size_t, 4> leaves{};
        for (const auto& p : parts) {
            for (std::size_t k = 0; k < leaves.size(); ++k) leaves[k] += p.leaves_by_size[k];
        }
        report["partition"] = {{"masks", "masks_lq"},
                               {"leaves", {{"8", leaves[0]}, {"16", leaves[1]},
                                           {"32", leaves[2]}, {"64", leaves[3]}}}};

        conditions.push_back({"anchor", lq, 0.0});
        for (double a : config.usm_strengths) {
            SequenceResult r = usm_sequence(lq, a, {}, config.jobs);
            conditions.push_back({condition_name(a), std::move(r.sequence), a});
        }
        SequenceResult r = sharpen_sequence(lq, masks, config.alpha_table, config.smooth_sigma,
                                            {}, config.jobs);
        conditions.push_back({"adaptive", std::move(r.sequence), r.mean_alpha});
        for (const auto& c : conditions) {
            write_y4m_file(c.sequence, out / (c.name + ".y4m"));
            log << "sharpen: " << c.name << " mean alpha " << c.mean_alpha << '\n';
        }
        return 0;
    });

    // Pre-encode fidelity against the reference.
    const Sequence reference = stage("metrics", [&] { return read_y4m_file(reference_path); });
    json quality = json::object();
    for (const auto& c : conditions) {
        quality[c.name] = stage("metrics", [&] {
            return to_json(evaluate_quality(reference, c.sequence, config.jobs));
        });
    }
    report["pre_encode_quality"] = quality;

    // RD sweeps, one directory per condition.
    std::map<std::string, SweepResult> sweeps;
    json sweep_json = json::object();
    for (const auto& c : conditions) {
        SweepOptions opts;
        opts.crf_list = config.crf_list;
        opts.metrics = config.metrics;
        opts.parallelism = config.parallelism;
        opts.metric_jobs = config.jobs;
        const fs::path dir = out / "sweeps" / c.name;
        SweepResult r = stage("rd-sweep", [&] {
            return rd_sweep(config.encoder, out / (c.name + ".y4m"), reference_path, dir, opts);
        });
        json curves = json::array();
        for (const auto& curve : r.curves) {
            curves.push_back(curve_json(curve));
        }
        sweep_json[c.name] = {{"workdir", fs::relative(dir, out).string()},
                              {"curves", curves},
                              {"warnings", r.warnings}};
        log << "rd-sweep: " << c.name << " done (" << r.rungs.size() << " rungs)\n";
        sweeps.emplace(c.name, std::move(r));
    }
    report["sweeps"] = sweep_json;

    // BD-Rate of every condition against the unsharpened anchor.
    json bd = json::object();
    const SweepResult& anchor = sweeps.at("anchor");
    for (const auto& c : conditions) {
        if (c.name == "anchor") {
            continue;
        }
        json per_metric = json::object();
        for (std::size_t m = 0; m < config.metrics.size(); ++m) {
            try {
                const BdRateResult r = bd_rate(anchor.curves[m], sweeps.at(c.name).curves[m]);
                per_metric[config.metrics[m]] = {{"bd_rate_percent", r.percent},
                                                 {"overlap_interval", {r.overlap_lo, r.overlap_hi}},
                                                 {"warnings", r.warnings}};
            } catch (const Error& e) {
                per_metric[config.metrics[m]] = {{"error", e.what()}};
            }
        }
        bd[c.name] = per_metric;
    }
    report["bd_rate"] = bd;

    std::vector<PlotSeries> series;
    for (const auto& c : conditions) {
        PlotSeries s{c.name, {}};
        for (const auto& p : sweeps.at(c.name).curves.front().points()) {
            s.points.emplace_back(p.rate_kbps, p.quality);
        }
        series.push_back(std::move(s));
    }
    stage("report", [&] {
        std::ofstream svg(out / "rd_plot.svg", std::ios::trunc);
        svg << render_rd_plot_svg(series, config.metrics.front());
        report["plot"] = "rd_plot.svg";
        std::ofstream rep(out / "report.json", std::ios::trunc);
        rep << report.dump(2) << '\n';
        if (!svg || !rep) {
            throw IoError("cannot write report files in '" + out.string() + "'");
        }
        return 0;
    });
    log << "report: " << (out / "report.json").string() << '\n';
    return report;
}

std::string render_rd_plot_svg(const std::vector<PlotSeries>& series, const std::string& metric) {
    constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 150, kTop = 30,
                     kBottom = 50;
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b"};
    double rmin = INFINITY, rmax = -INFINITY, qmin = INFINITY, qmax = -INFINITY;
    for (const auto& s : series) {
        for (const auto& [r, q] : s.points) {
            if (!std::isfinite(q)) continue;
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
            qmin = std::min(qmin, q);
            qmax = std::max(qmax, q);
        }
    }
    if (!(rmax > rmin)) { rmin = std::isfinite(rmin) ? rmin * 0.9 : 0; rmax = rmin + 1; }
    if (!(qmax > qmin)) { qmin = std::isfinite(qmin) ? qmin - 1 : 0; qmax = qmin + 2; }
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double r) { return kLeft + (r - rmin) / (rmax - rmin) * pw; };
    auto sy = [&](double q) { return kTop + ph - (q - qmin) / (qmax - qmin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double r = rmin + (rmax - rmin) * i / 4.0;
        const double q = qmin + (qmax - qmin) * i / 4.0;
        os << "<text x=\"" << sx(r) << "\" y=\"" << kTop + ph + 18
           << "\" text-anchor=\"middle\">" << format_number(std::round(r * 10) / 10) << "</text>\n";
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(q) + 4 << "\" text-anchor=\"end\">"
           << format_number(std::round(q * 1000) / 1000) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
       << "\" text-anchor=\"middle\">rate (kbps)</text>\n";
    os << "<text transform=\"translate(16," << kTop + ph / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << metric << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [r, q] : series[i].points) {
            if (std::isfinite(q)) os << sx(r) << ',' << sy(q) << ' ';
        }
        os << "\"/>\n";
        for (const auto& [r, q] : series[i].points) {
            if (std::isfinite(q)) {
                os << "<circle cx=\"" << sx(r) << "\" cy=\"" << sy(q) << "\" r=\"3\" fill=\""
                   << color << "\"/>\n";
            }
        }
        const double ly = kTop + 16.0 * static_cast<double>(i) + 8;
        os << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 32
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly + 4 << "\">" << series[i].label
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string format_frame_pattern(const std::string& pattern, std::size_t index) {
    std::string out;
    int conversions = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != '%') {
            out.push_back(pattern[i]);
            continue;
        }
        if (i + 1 < pattern.size() && pattern[i + 1] == '%') {
            out.push_back('%');
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        const bool zero = j < pattern.size() && pattern[j] == '0';
        if (zero) ++j;
        int width = 0;
        while (j < pattern.size() && std::isdigit(static_cast<unsigned char>(pattern[j]))) {
            width = width * 10 + (pattern[j] - '0');
            ++j;
            if (width > 32) {
                throw PreconditionError("frame pattern field width too large in '" + pattern + "'");
            }
        }
        if (j >= pattern.size() || pattern[j] != 'd') {
            throw PreconditionError("frame pattern '" + pattern +
                                    "' may only use one %d-style conversion");
        }
        std::string digits = std::to_string(index);
        if (static_cast<int>(digits.size()) < width) {
            digits.insert(0, static_cast<std::size_t>(width) - digits.size(), zero ? '0' : ' ');
        }
        out += digits;
        ++conversions;
        i = j;
    }
    if (conversions != 1) {
        throw PreconditionError("frame pattern '" + pattern +
                                "' must contain exactly one %d-style conversion");
    }
    return out;
}

}  // namespace adasharp
