#include "adasharp/codec_harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "adasharp/error.hpp"
#include "adasharp/metrics.hpp"
#include "adasharp/parallel.hpp"
#include "adasharp/process.hpp"
#include "adasharp/y4m.hpp"

namespace fs = std::filesystem;

namespace adasharp {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    bool in_token = false;
    bool quoted = false;
    for (char c : text) {
        if (c == '"') {
            quoted = !quoted;
            in_token = true;
        } else if (!quoted && (c == ' ' || c == '\t' || c == '\n')) {
            if (in_token) {
                tokens.push_back(std::move(current));
                current.clear();
                in_token = false;
            }
        } else {
            current.push_back(c);
            in_token = true;
        }
    }
    if (quoted) {
        throw PreconditionError("unbalanced quote in command template '" + text + "'");
    }
    if (in_token) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

// Calls fn(name) for every {name} in token.
template <class Fn>
void for_each_placeholder(const std::string& token, Fn&& fn) {
    std::size_t pos = 0;
    while ((pos = token.find('{', pos)) != std::string::npos) {
        const std::size_t close = token.find('}', pos);
        if (close == std::string::npos) {
            return;
        }
        fn(token.substr(pos + 1, close - pos - 1), pos, close);
        pos = close + 1;
    }
}

void require_placeholders(const CommandTemplate& tpl, const std::vector<std::string>& required,
                          const char* which) {
    for (const auto& name : required) {
        const int n = tpl.count(name);
        if (n != 1) {
            throw PreconditionError(std::string(which) + " template must contain {" + name +
                                    "} exactly once, found " + std::to_string(n) + ": '" +
                                    tpl.text() + "'");
        }
    }
    for (const auto& name : tpl.placeholders()) {
        if (std::find(required.begin(), required.end(), name) == required.end()) {
            throw PreconditionError(std::string(which) + " template has unknown placeholder {" +
                                    name + "}");
        }
    }
    if (tpl.tokens().empty()) {
        throw PreconditionError(std::string(which) + " template is empty");
    }
}

std::string rung_stem(int crf) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "crf%02d", crf);
    return buf;
}

std::vector<std::string> resolved_argv(const CommandTemplate& tpl,
                                       const std::map<std::string, std::string>& values) {
    auto argv = tpl.expand(values);
    const auto exe = resolve_executable(argv.front());
    if (!exe) {
        throw EnvironmentError("executable '" + argv.front() +
                               "' not found (searched ADASHARP_ENCODER_PATH and PATH)");
    }
    argv.front() = exe->string();
    return argv;
}

std::string tail(const std::string& text, std::size_t limit = 4000) {
    return text.size() <= limit ? text : "..." + text.substr(text.size() - limit);
}

void remove_quietly(const fs::path& p) {
    std::error_code ec;
    fs::remove(p, ec);
}

void write_manifest(const fs::path& workdir, const EncoderSpec& spec, const fs::path& input,
                    const fs::path& ref, const SweepOptions& options,
                    const std::vector<std::optional<SweepRung>>& rungs,
                    const std::vector<std::string>& curve_files,
                    const std::vector<std::string>& warnings, bool partial,
                    std::optional<int> failed_crf, const std::string& error) {
    nlohmann::json rung_list = nlohmann::json::array();
    for (const auto& r : rungs) {
        if (!r) {
            continue;
        }
        nlohmann::json quality = nlohmann::json::object();
        for (const auto& [k, v] : r->quality) {
            quality[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_number(v));
        }
        rung_list.push_back({{"crf", r->crf},
                             {"rate_kbps", r->rate_kbps},
                             {"bytes", r->bytes},
                             {"bitstream", r->bitstream.filename().string()},
                             {"decoded", r->decoded.filename().string()},
                             {"quality", quality}});
    }
    nlohmann::json manifest = {{"encoder", to_json(spec)},
                               {"input", input.string()},
                               {"ref", ref.string()},
                               {"crf_list", options.crf_list},
                               {"metrics", options.metrics},
                               {"partial", partial},
                               {"rungs", rung_list},
                               {"curves", curve_files},
                               {"warnings", warnings}};
    if (failed_crf) {
        manifest["failed_crf"] = *failed_crf;
        manifest["error"] = error;
    }
    std::ofstream out(workdir / "manifest.json", std::ios::trunc);
    if (!out) {
        throw IoError("cannot write manifest in '" + workdir.string() + "'");
    }
    out << manifest.dump(2) << '\n';
}

}  // namespace

CommandTemplate::CommandTemplate(std::string text)
    : text_(std::move(text)), tokens_(tokenize(text_)) {}

int CommandTemplate::count(const std::string& placeholder) const {
    int n = 0;
    for (const auto& token : tokens_) {
        for_each_placeholder(token, [&](const std::string& name, std::size_t, std::size_t) {
            n += name == placeholder;
        });
    }
    return n;
}

std::vector<std::string> CommandTemplate::placeholders() const {
    std::vector<std::string> names;
    for (const auto& token : tokens_) {
        for_each_placeholder(token, [&](const std::string& name, std::size_t, std::size_t) {
            names.push_back(name);
        });
    }
    return names;
}

std::vector<std::string> CommandTemplate::expand(
    const std::map<std::string, std::string>& values) const {
    std::vector<std::string> argv;
    argv.reserve(tokens_.size());
    for (const auto& token : tokens_) {
        std::string out;
        std::size_t copied = 0;
        for_each_placeholder(token, [&](const std::string& name, std::size_t open,
                                        std::size_t close) {
            const auto it = values.find(name);
            if (it == values.end()) {
                throw PreconditionError("no value for placeholder {" + name + "} in '" + text_ +
                                        "'");
            }
            out.append(token, copied, open - copied);
            out += it->second;
            copied = close + 1;
        });
        out.append(token, copied, std::string::npos);
        argv.push_back(std::move(out));
    }
    return argv;
}

void EncoderSpec::validate() const {
    if (name.empty()) {
        throw PreconditionError("encoder spec needs a name");
    }
    if (preset.empty()) {
        throw PreconditionError("encoder spec '" + name + "' needs a preset");
    }
    require_placeholders(CommandTemplate(encode_template), {"input", "output", "crf", "preset"},
                         "encode");
    require_placeholders(CommandTemplate(decode_template), {"input", "output"}, "decode");
}

EncoderSpec builtin_encoder(const std::string& name) {
    const std::string common = "ffmpeg -nostdin -hide_banner -loglevel error -y ";
    if (name == "h264") {
        return {"h264",
                common + "-i {input} -an -c:v libx264 -preset {preset} -crf {crf} -threads 1 "
                         "-f h264 {output}",
                common + "-threads 1 -f h264 -i {input} -f yuv4mpegpipe {output}", "medium"};
    }
    if (name == "h265") {
        return {"h265",
                common + "-i {input} -an -c:v libx265 -preset {preset} -crf {crf} "
                         "-x265-params pools=none:frame-threads=1:log-level=error -f hevc {output}",
                common + "-threads 1 -f hevc -i {input} -f yuv4mpegpipe {output}", "medium"};
    }
    throw PreconditionError("unknown builtin encoder '" + name + "' (expected h264 or h265)");
}

std::vector<std::string> builtin_encoder_names() { return {"h264", "h265"}; }

nlohmann::json to_json(const EncoderSpec& spec) {
    return {{"name", spec.name},
            {"encode_template", spec.encode_template},
            {"decode_template", spec.decode_template},
            {"preset", spec.preset}};
}

double rate_kbps(std::uintmax_t bytes, double duration_seconds) {
    if (!(duration_seconds > 0.0)) {
        throw PreconditionError("clip duration must be positive");
    }
    return static_cast<double>(bytes) * 8.0 / duration_seconds / 1000.0;
}

EncodeResult run_encode(const EncoderSpec& spec, const fs::path& input, int crf,
                        const fs::path& workdir) {
    spec.validate();
    const fs::path bitstream = workdir / (rung_stem(crf) + ".bin");
    const fs::path log = workdir / (rung_stem(crf) + ".encode.log");
    const auto argv = resolved_argv(CommandTemplate(spec.encode_template),
                                    {{"input", input.string()},
                                     {"output", bitstream.string()},
                                     {"crf", std::to_string(crf)},
                                     {"preset", spec.preset}});
    const Y4mInfo info = probe_y4m_file(input);

    std::error_code ec;
    fs::create_directories(workdir, ec);
    if (ec) {
        throw IoError("cannot create work directory '" + workdir.string() + "': " + ec.message());
    }
    remove_quietly(bitstream);

    const ProcessResult run = run_process(argv, log);
    if (run.exit_code != 0) {
        remove_quietly(bitstream);
        throw EncoderError("encoder '" + spec.name + "' exited with status " +
                               std::to_string(run.exit_code) + " at crf " + std::to_string(crf) +
                               ": " + tail(run.stderr_text),
                           run.stderr_text);
    }
    const auto bytes = fs::exists(bitstream, ec) ? fs::file_size(bitstream, ec) : 0;
    if (ec || bytes == 0) {
        remove_quietly(bitstream);
        throw OutputError("encoder '" + spec.name + "' produced no output at crf " +
                          std::to_string(crf) + " ('" + bitstream.string() + "')");
    }
    return {bitstream, log, bytes, rate_kbps(bytes, info.duration_seconds())};
}

void run_decode(const EncoderSpec& spec, const fs::path& bitstream, const fs::path& output,
                const fs::path& log) {
    spec.validate();
    const auto argv = resolved_argv(CommandTemplate(spec.decode_template),
                                    {{"input", bitstream.string()}, {"output", output.string()}});
    remove_quietly(output);
    const ProcessResult run = run_process(argv, log);
    if (run.exit_code != 0) {
        remove_quietly(output);
        throw EncoderError("decoder for '" + spec.name + "' exited with status " +
                               std::to_string(run.exit_code) + ": " + tail(run.stderr_text),
                           run.stderr_text);
    }
    std::error_code ec;
    if (!fs::exists(output, ec) || fs::file_size(output, ec) == 0) {
        throw OutputError("decoder for '" + spec.name + "' produced no output ('" +
                          output.string() + "')");
    }
}

SweepResult rd_sweep(const EncoderSpec& spec, const fs::path& input, const fs::path& ref,
                     const fs::path& workdir, const SweepOptions& options) {
    spec.validate();
    if (options.crf_list.empty()) {
        throw ArityError("CRF list must not be empty");
    }
    std::vector<int> crfs = options.crf_list;
    std::sort(crfs.begin(), crfs.end());
    if (std::adjacent_find(crfs.begin(), crfs.end()) != crfs.end()) {
        throw PreconditionError("CRF list contains duplicates");
    }
    if (options.metrics.empty()) {
        throw ArityError("metric list must not be empty");
    }
    for (const auto& m : options.metrics) {
        if (!is_rd_metric(m)) {
            throw PreconditionError("metric '" + m + "' cannot be an RD quality axis");
        }
    }
    // Fail on a missing binary before touching the filesystem.
    resolved_argv(CommandTemplate(spec.encode_template),
                  {{"input", ""}, {"output", ""}, {"crf", ""}, {"preset", ""}});
    resolved_argv(CommandTemplate(spec.decode_template), {{"input", ""}, {"output", ""}});

    const Sequence reference = read_y4m_file(ref);
    std::error_code ec;
    fs::create_directories(workdir, ec);
    if (ec) {
        throw IoError("cannot create work directory '" + workdir.string() + "': " + ec.message());
    }

    std::vector<std::optional<SweepRung>> done(crfs.size());
    std::vector<std::string> errors(crfs.size());
    std::atomic<bool> abort{false};
    const int workers = options.parallelism > 0 ? options.parallelism : static_cast<int>(crfs.size());
    parallel_for(crfs.size(), workers, [&](std::size_t i) {
        if (abort) {
            return;
        }
        try {
            const int crf = crfs[i];
            const EncodeResult enc = run_encode(spec, input, crf, workdir);
            SweepRung rung;
            rung.crf = crf;
            rung.rate_kbps = enc.rate_kbps;
            rung.bytes = enc.bytes;
            rung.bitstream = enc.bitstream;
            rung.decoded = workdir / (rung_stem(crf) + ".y4m");
            run_decode(spec, enc.bitstream, rung.decoded,
                       workdir / (rung_stem(crf) + ".decode.log"));
            const Sequence decoded = read_y4m_file(rung.decoded);
            for (const auto& metric : options.metrics) {
                rung.quality[metric] = sequence_metric(metric, reference, decoded,
                                                       options.metric_jobs);
            }
            done[i] = std::move(rung);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            abort = true;
        }
    });

    SweepResult result;
    for (std::size_t i = 0; i < crfs.size(); ++i) {
        if (!errors[i].empty()) {
            const std::string what =
                "rung crf " + std::to_string(crfs[i]) + " failed: " + errors[i];
            write_manifest(workdir, spec, input, ref, options, done, {}, {}, true, crfs[i], what);
            throw SweepError(what, crfs[i]);
        }
    }
    for (auto& r : done) {
        if (!r) {
            // Only reachable when a later rung failed, which was handled above.
            throw SweepError("rung missing from sweep", -1);
        }
        result.rungs.push_back(std::move(*r));
    }
    for (std::size_t i = 1; i < result.rungs.size(); ++i) {
        if (result.rungs[i].rate_kbps > result.rungs[i - 1].rate_kbps) {
            result.warnings.push_back("rate increases from crf " +
                                      std::to_string(result.rungs[i - 1].crf) + " to crf " +
                                      std::to_string(result.rungs[i].crf));
        }
    }

    // Curves need distinct rates; on a tie the lowest CRF stands for the group.
    std::vector<const SweepRung*> curve_rungs;
    for (const auto& r : result.rungs) {
        const auto same = std::find_if(curve_rungs.begin(), curve_rungs.end(),
                                       [&](const SweepRung* c) { return c->rate_kbps == r.rate_kbps; });
        if (same != curve_rungs.end()) {
            result.warnings.push_back("crf " + std::to_string(r.crf) + " has the same rate as crf " +
                                      std::to_string((*same)->crf) + " and is left off the curves");
        } else {
            curve_rungs.push_back(&r);
        }
    }

    std::vector<std::string> curve_files;
    for (const auto& metric : options.metrics) {
        std::vector<RdPoint> points;
        for (const SweepRung* r : curve_rungs) {
            points.push_back({r->rate_kbps, r->quality.at(metric), r->crf});
        }
        RdCurve curve(metric, std::move(points));
        const std::string file = "curve_" + metric + ".csv";
        write_rd_curve_csv_file(curve, workdir / file);
        curve_files.push_back(file);
        result.curves.push_back(std::move(curve));
    }
    std::vector<std::optional<SweepRung>> final_rungs(result.rungs.begin(), result.rungs.end());
    write_manifest(workdir, spec, input, ref, options, final_rungs, curve_files, result.warnings,
                   false, std::nullopt, {});
    return result;
}

RdCurve rd_skeleton(const SweepResult& sweep, const std::string& metric) {
    std::vector<RdPoint> points;
    for (const auto& r : sweep.rungs) {
        points.push_back({r.rate_kbps, std::numeric_limits<double>::quiet_NaN(), r.crf});
    }
    return RdCurve(metric, std::move(points));
}

RdCurve import_external_scores(const RdCurve& skeleton, const fs::path& csv,
                               const std::string& metric) {
    std::ifstream in(csv);
    if (!in) {
        throw IoError("cannot open score file '" + csv.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ImportError(csv.string() + ": empty score file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "crf,score") {
        throw ImportError(csv.string() + ": header must be 'crf,score', got '" + line + "'");
    }

    std::map<int, std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        int crf = 0;
        double score = 0.0;
        const char* end = line.data() + line.size();
        const auto r1 = std::from_chars(line.data(), line.data() + std::min(comma, line.size()), crf);
        const bool ok1 = comma != std::string::npos && r1.ec == std::errc() &&
                         r1.ptr == line.data() + comma;
        const auto r2 = ok1 ? std::from_chars(line.data() + comma + 1, end, score)
                            : std::from_chars_result{nullptr, std::errc::invalid_argument};
        if (!ok1 || r2.ec != std::errc() || r2.ptr != end) {
            throw ImportError(csv.string() + ": malformed row " + std::to_string(line_no) + ": '" +
                              line + "'");
        }
        rows[crf].push_back(score);
    }

    std::set<int> expected;
    for (const auto& p : skeleton.points()) {
        if (!p.crf) {
            throw PreconditionError("skeleton curve points need CRF values");
        }
        expected.insert(*p.crf);
    }
    std::vector<int> missing;
    std::vector<int> duplicate;
    std::vector<int> unknown;
    for (int crf : expected) {
        const auto it = rows.find(crf);
        if (it == rows.end()) {
            missing.push_back(crf);
        } else if (it->second.size() > 1) {
            duplicate.push_back(crf);
        }
    }
    for (const auto& [crf, scores] : rows) {
        if (!expected.count(crf)) {
            unknown.push_back(crf);
        }
    }
    if (!missing.empty() || !duplicate.empty() || !unknown.empty()) {
        auto list = [](const std::vector<int>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) {
                s += (i ? ", " : "") + std::to_string(v[i]);
            }
            return s;
        };
        std::string what = csv.string() + ": score import failed;";
        if (!missing.empty()) what += " missing crf: " + list(missing) + ";";
        if (!duplicate.empty()) what += " duplicate crf: " + list(duplicate) + ";";
        if (!unknown.empty()) what += " unknown crf: " + list(unknown) + ";";
        what.pop_back();
        throw ImportError(what);
    }

    std::vector<RdPoint> points;
    for (const auto& p : skeleton.points()) {
        points.push_back({p.rate_kbps, rows.at(*p.crf).front(), p.crf});
    }
    return RdCurve(metric, std::move(points));
}

}  // namespace adasharp
