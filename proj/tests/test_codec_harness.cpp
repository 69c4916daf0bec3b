#include <cstdlib>
#include <fstream>

#include "adasharp/codec_harness.hpp"
#include "adasharp/error.hpp"
#include "adasharp/process.hpp"
#include "adasharp/y4m.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace adasharp;
namespace fs = std::filesystem;

namespace {

// Encoder spec driving fake_codec.sh; `mode` is its optional sixth argument.
EncoderSpec fake_spec(const fs::path& source, const std::string& mode = "") {
    const std::string script = "\"" + testing::fake_codec_script().string() + "\"";
    EncoderSpec spec;
    spec.name = "fake";
    spec.encode_template = script + " enc {input} {output} {crf} {preset}" + (mode.empty() ? "" : " " + mode);
    spec.decode_template = script + " dec {input} {output} \"" + source.string() + "\"";
    spec.preset = "fast";
    return spec;
}

fs::path write_clip(const testing::TempDir& dir, int frames, int fps, int w = 32, int h = 32) {
    std::vector<Frame> v;
    for (int i = 0; i < frames; ++i) v.push_back(testing::random_textured_frame(w, h, static_cast<std::uint64_t>(i)));
    const fs::path p = dir / "clip.y4m";
    write_y4m_file(Sequence(v, fps, 1), p);
    return p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("command templates") {
    const CommandTemplate t("x264 --crf {crf} --preset {preset} -o {output} \"{input}\"");
    CHECK(t.count("crf") == 1);
    CHECK(t.expand({{"crf", "27"}, {"preset", "slow"}, {"output", "out.bin"}, {"input", "my clip.y4m"}}) ==
          std::vector<std::string>{"x264", "--crf", "27", "--preset", "slow", "-o", "out.bin", "my clip.y4m"});
    const CommandTemplate plain("enc -i {input} -crf {crf} -preset {preset} -o {output}");
    CHECK(plain.expand({{"input", "in.y4m"}, {"crf", "27"}, {"preset", "medium"}, {"output", "out.bin"}}) ==
          std::vector<std::string>{"enc", "-i", "in.y4m", "-crf", "27", "-preset", "medium", "-o", "out.bin"});
    const CommandTemplate inner("enc --out=dir/{output}.264");
    CHECK(inner.expand({{"output", "a"}})[1] == "--out=dir/a.264");
    CHECK_THROWS_AS(t.expand({{"crf", "27"}}), PreconditionError);
    CHECK_THROWS_AS(CommandTemplate("enc \"unterminated"), PreconditionError);
}

TEST_CASE("encoder spec validation") {
    for (const auto& name : builtin_encoder_names()) {
        const EncoderSpec spec = builtin_encoder(name);
        CHECK_NOTHROW(spec.validate());
        CHECK(spec.name == name);
        CHECK(to_json(spec)["preset"] == "medium");
    }
    CHECK_THROWS_AS(builtin_encoder("vp9"), PreconditionError);
    EncoderSpec spec = fake_spec("src.y4m");
    CHECK_NOTHROW(spec.validate());
    spec.encode_template = "enc {input} {output} {crf}";
    CHECK_THROWS_AS(spec.validate(), PreconditionError);
    spec.encode_template = "enc {input} {output} {crf} {preset} {crf}";
    CHECK_THROWS_AS(spec.validate(), PreconditionError);
    spec.encode_template = "enc {input} {output} {crf} {preset} {bogus}";
    CHECK_THROWS_AS(spec.validate(), PreconditionError);
    spec = fake_spec("src.y4m");
    spec.decode_template = "";
    CHECK_THROWS_AS(spec.validate(), PreconditionError);
}

TEST_CASE("executable resolution prefers ADASHARP_ENCODER_PATH") {
    testing::TempDir a, b;
    for (const auto* d : {&a, &b}) {
        const fs::path exe = *d / "my-encoder";
        write_text(exe, "#!/bin/sh\nexit 0\n");
        fs::permissions(exe, fs::perms::owner_all);
    }
    {
        testing::ScopedEncoderPath scope(a.path());
        CHECK(resolve_executable("my-encoder") == a / "my-encoder");
    }
    {
        testing::ScopedEncoderPath scope(b.path());
        CHECK(resolve_executable("my-encoder") == b / "my-encoder");
    }
    CHECK_FALSE(resolve_executable("definitely-not-an-encoder-xyz").has_value());
    CHECK(resolve_executable("sh").has_value());
}

TEST_CASE("process runner captures stderr and exit status") {
    testing::TempDir dir;
    const ProcessResult r = run_process({"/bin/sh", "-c", "echo oops >&2; exit 7"}, dir / "log");
    CHECK(r.exit_code == 7);
    CHECK(r.stderr_text == "oops\n");
    CHECK(testing::read_bytes(dir / "log") == "oops\n");
    const ProcessResult killed = run_process({"/bin/sh", "-c", "kill -9 $$"}, dir / "log2");
    CHECK(killed.exit_code == 128 + 9);
}

TEST_CASE("single encode") {
    testing::TempDir dir;
    const fs::path clip = write_clip(dir, 8, 30);

    SUBCASE("rate from byte count and duration") {
        const EncodeResult r = run_encode(fake_spec(clip, "4000"), clip, 27, dir / "work");
        CHECK(r.bytes == 4000);
        CHECK(r.rate_kbps == doctest::Approx(120.0).epsilon(1e-12));
        CHECK(r.bitstream == dir / "work" / "crf27.bin");
        CHECK(testing::read_bytes(r.log).find("encoding crf 27 preset fast") != std::string::npos);
        CHECK(rate_kbps(1000, 2.0) == 4.0);
        CHECK_THROWS_AS(rate_kbps(1000, 0.0), PreconditionError);
    }
    SUBCASE("missing binary") {
        EncoderSpec spec = fake_spec(clip);
        spec.encode_template = "no-such-encoder-binary {input} {output} {crf} {preset}";
        CHECK_THROWS_AS(run_encode(spec, clip, 27, dir / "work"), EnvironmentError);
        CHECK_FALSE(fs::exists(dir / "work"));
    }
    SUBCASE("encoder failure carries stderr") {
        try {
            run_encode(fake_spec(clip, "fail=30"), clip, 30, dir / "work");
            FAIL("expected EncoderError");
        } catch (const EncoderError& e) {
            CHECK(e.stderr_text().find("refused crf 30") != std::string::npos);
            CHECK(std::string(e.what()).find("status 3") != std::string::npos);
        }
        CHECK_FALSE(fs::exists(dir / "work" / "crf30.bin"));
    }
    SUBCASE("empty output") {
        CHECK_THROWS_AS(run_encode(fake_spec(clip, "empty"), clip, 21, dir / "work"), OutputError);
        CHECK_FALSE(fs::exists(dir / "work" / "crf21.bin"));
    }
}

TEST_CASE("RD sweep with the fake codec") {
    testing::TempDir dir;
    const fs::path clip = write_clip(dir, 4, 25);

    SUBCASE("five rungs, self comparison") {
        const fs::path log = dir / "argv.log";
        setenv("FAKE_CODEC_LOG", log.c_str(), 1);
        SweepOptions opt;
        opt.crf_list = {33, 21, 27, 24, 30};
        opt.metrics = {"psnr"};
        const SweepResult r = rd_sweep(fake_spec(clip), clip, clip, dir / "sweep", opt);
        unsetenv("FAKE_CODEC_LOG");
        REQUIRE(r.rungs.size() == 5);
        for (std::size_t i = 0; i < r.rungs.size(); ++i) {
            CHECK(r.rungs[i].crf == 21 + 3 * static_cast<int>(i));
            CHECK(r.rungs[i].bytes == static_cast<std::uintmax_t>((60 - r.rungs[i].crf) * 100));
            CHECK(std::isinf(r.rungs[i].quality.at("psnr")));
            CHECK(fs::exists(r.rungs[i].decoded));
        }
        CHECK(r.warnings.empty());
        REQUIRE(r.curves.size() == 1);
        CHECK(read_rd_curve_csv_file(dir / "sweep" / "curve_psnr.csv").size() == 5);
        std::ifstream in(dir / "sweep" / "manifest.json");
        const auto manifest = nlohmann::json::parse(in);
        CHECK(manifest["partial"] == false);
        CHECK(manifest["encoder"]["name"] == "fake");
        const std::string calls = testing::read_bytes(log);
        CHECK(std::count(calls.begin(), calls.end(), '\n') == 10);
        CHECK(calls.find("enc " + clip.string() + " " + (dir / "sweep" / "crf27.bin").string() + " 27 fast") !=
              std::string::npos);
    }
    SUBCASE("rate that rises with CRF is flagged") {
        SweepOptions opt;
        opt.crf_list = {21, 27};
        const SweepResult r = rd_sweep(fake_spec(clip, "500"), clip, clip, dir / "flat", opt);
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].find("crf 27 has the same rate as crf 21") != std::string::npos);
        CHECK(r.rungs.size() == 2);
        CHECK(r.curves[0].size() == 1);
        EncoderSpec spec = fake_spec(clip);
        spec.encode_template = "/bin/sh -c \"head -c $((100+$3*10)) /dev/zero > $2\" sh {input} {output} {crf} {preset}";
        const SweepResult rising = rd_sweep(spec, clip, clip, dir / "rising", opt);
        REQUIRE(rising.warnings.size() == 1);
        CHECK(rising.warnings[0].find("crf 21 to crf 27") != std::string::npos);
    }
    SUBCASE("argument errors") {
        SweepOptions opt;
        opt.crf_list = {};
        CHECK_THROWS_AS(rd_sweep(fake_spec(clip), clip, clip, dir / "s", opt), ArityError);
        opt.crf_list = {21, 21};
        CHECK_THROWS_AS(rd_sweep(fake_spec(clip), clip, clip, dir / "s", opt), PreconditionError);
        opt.crf_list = {21};
        opt.metrics = {"charbonnier"};
        CHECK_THROWS_AS(rd_sweep(fake_spec(clip), clip, clip, dir / "s", opt), PreconditionError);
    }
    SUBCASE("failing rung leaves a partial manifest") {
        SweepOptions opt;
        opt.crf_list = {21, 27, 33};
        opt.parallelism = 1;
        try {
            rd_sweep(fake_spec(clip, "fail=27"), clip, clip, dir / "partial", opt);
            FAIL("expected SweepError");
        } catch (const SweepError& e) {
            CHECK(e.crf() == 27);
            CHECK(std::string(e.what()).find("refused crf 27") != std::string::npos);
        }
        std::ifstream in(dir / "partial" / "manifest.json");
        const auto manifest = nlohmann::json::parse(in);
        CHECK(manifest["partial"] == true);
        CHECK(manifest["failed_crf"] == 27);
        CHECK_FALSE(fs::exists(dir / "partial" / "curve_psnr.csv"));
    }
}

TEST_CASE("external score import") {
    const RdCurve skeleton("psnr", {{100, NAN, 33}, {200, NAN, 27}, {400, NAN, 21}});
    testing::TempDir dir;
    const fs::path csv = dir / "scores.csv";

    write_text(csv, "crf,score\n21,0.9\n27,0.8\r\n33,0.7\n");
    const RdCurve c = import_external_scores(skeleton, csv, "lpips_inv");
    CHECK(c.metric() == "lpips_inv");
    CHECK(c.points()[0].quality == 0.7);
    CHECK(c.points()[2].quality == 0.9);

    auto import_error = [&](const std::string& text) {
        write_text(csv, text);
        try {
            import_external_scores(skeleton, csv, "x");
        } catch (const ImportError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(import_error("crf,score\n21,0.9\n33,0.7\n").find("missing crf: 27") != std::string::npos);
    CHECK(import_error("crf,score\n21,0.9\n27,0.8\n33,0.7\n18,1\n").find("unknown crf: 18") != std::string::npos);
    CHECK(import_error("crf,score\n21,0.9\n21,0.9\n27,0.8\n33,0.7\n").find("duplicate crf: 21") != std::string::npos);
    CHECK(import_error("crf,value\n").find("header") != std::string::npos);
    CHECK(import_error("crf,score\n21;0.9\n").find("malformed row 2") != std::string::npos);
    CHECK_THROWS_AS(import_external_scores(skeleton, dir / "none.csv", "x"), IoError);
}

TEST_CASE("real H.264 encoder round trip") {
    if (!fs::exists(testing::encoder_dir() / "ffmpeg")) {
        MESSAGE("ffmpeg not available; skipping");
        return;
    }
    testing::ScopedEncoderPath scope(testing::encoder_dir());
    testing::TempDir dir;
    const fs::path clip = write_clip(dir, 6, 30, 64, 48);
    SweepOptions opt;
    opt.crf_list = {0, 24, 36};
    const SweepResult r = rd_sweep(builtin_encoder("h264"), clip, clip, dir / "sweep", opt);
    REQUIRE(r.rungs.size() == 3);
    CHECK(std::isinf(r.rungs[0].quality.at("psnr")));
    CHECK(r.rungs[0].rate_kbps > r.rungs[1].rate_kbps);
    CHECK(r.rungs[1].rate_kbps > r.rungs[2].rate_kbps);
    CHECK(r.rungs[1].quality.at("psnr") > r.rungs[2].quality.at("psnr"));
    const Sequence decoded = read_y4m_file(r.rungs[1].decoded);
    CHECK(decoded.size() == 6);
    CHECK(decoded.width() == 64);
}
