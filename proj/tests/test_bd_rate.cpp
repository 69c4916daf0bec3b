#include <cmath>
#include <random>
#include <sstream>

#include "adasharp/bd_rate.hpp"
#include "adasharp/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace adasharp;

namespace {

RdCurve make_curve(const std::vector<double>& rate, const std::vector<double>& quality,
                   const std::string& metric = "psnr") {
    std::vector<RdPoint> pts;
    for (std::size_t i = 0; i < rate.size(); ++i) pts.push_back({rate[i], quality[i], 21 + 3 * static_cast<int>(i)});
    return RdCurve(metric, pts);
}

RdCurve scaled(const RdCurve& c, double factor) {
    std::vector<RdPoint> pts = c.points();
    for (RdPoint& p : pts) p.rate_kbps *= factor;
    return RdCurve(c.metric(), pts);
}

RdCurve random_curve(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> step(0.1, 1.0);
    std::uniform_real_distribution<double> qstep(0.3, 3.0);
    std::vector<double> r, q;
    double lr = std::uniform_real_distribution<double>(6, 10)(rng);
    double qq = std::uniform_real_distribution<double>(28, 34)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        r.push_back(std::exp2(lr));
        q.push_back(qq);
        lr += step(rng);
        qq += qstep(rng);
    }
    return make_curve(r, q);
}

const RdCurve kAnchor = make_curve({1000, 1800, 3100, 5200, 8600}, {33.1, 35.6, 37.9, 39.8, 41.2});

}  // namespace

TEST_CASE("monotone cubic interpolant") {
    const MonotoneCubic line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(line(1.5) == doctest::Approx(4.0));
    CHECK(line.integral(0, 3) == doctest::Approx(12.0));
    CHECK(line.integral(0.5, 2.25) == doctest::Approx(0.5 * (2 + 5.5) * 1.75));

    const std::vector<double> x = {0, 0.4, 1.5, 1.7, 3.0, 4.2};
    const std::vector<double> y = {0, 0.1, 2.0, 2.05, 2.1, 4.0};
    const MonotoneCubic f(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(f(x[i]) == doctest::Approx(y[i]));
    // Shape preservation: monotone data gives a monotone interpolant.
    double prev = -1;
    for (int i = 0; i <= 4200; ++i) {
        const double v = f(i * 1e-3);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    // Closed-form integral agrees with a fine trapezoid rule on the interpolant.
    const int n = 10000;
    const double a = 0.2, b = 3.9;
    double trap = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) trap += f(a + (b - a) * i / n);
    trap *= (b - a) / n;
    CHECK(f.integral(a, b) == doctest::Approx(trap).epsilon(1e-7));

    // Flat segment stays flat.
    const MonotoneCubic flat({0, 1, 2, 3}, {0, 1, 1, 2});
    CHECK(flat(1.5) == doctest::Approx(1.0));

    CHECK_THROWS_AS(MonotoneCubic({0, 0, 1}, {1, 2, 3}), PreconditionError);
    CHECK_THROWS_AS(MonotoneCubic({0}, {1}), PreconditionError);
    CHECK_THROWS_AS(line.integral(-1, 2), PreconditionError);
}

TEST_CASE("BD-Rate analytic cases") {
    CHECK(bd_rate(kAnchor, kAnchor).percent == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bd_rate(kAnchor, scaled(kAnchor, 2.0)).percent == doctest::Approx(100.0).epsilon(1e-10));
    CHECK(bd_rate(kAnchor, scaled(kAnchor, 0.8)).percent == doctest::Approx(-20.0).epsilon(1e-10));
    const BdRateResult r = bd_rate(kAnchor, scaled(kAnchor, 0.5));
    CHECK(r.overlap_lo == 33.1);
    CHECK(r.overlap_hi == 41.2);
    CHECK(r.warnings.empty());
    CHECK(r.metric == "psnr");
}

TEST_CASE("BD-Rate matches the frozen scipy values") {
    for (const auto& c : testing::oracle_values()["bd_rate"]) {
        const RdCurve anchor = make_curve(c["anchor"]["rate"], c["anchor"]["quality"]);
        const RdCurve test = make_curve(c["test"]["rate"], c["test"]["quality"]);
        const BdRateResult r = bd_rate(anchor, test);
        CAPTURE(c["name"].get<std::string>());
        CHECK(r.percent == doctest::Approx(c["bd_rate_percent"].get<double>()).epsilon(1e-9));
        CHECK(r.overlap_lo == doctest::Approx(c["overlap"][0].get<double>()));
        CHECK(r.overlap_hi == doctest::Approx(c["overlap"][1].get<double>()));
    }
}

TEST_CASE("BD-Rate properties on random curves") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> factor(0.3, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const RdCurve a = random_curve(rng, 4 + static_cast<std::size_t>(trial % 4));
        const double c = factor(rng);
        CHECK(bd_rate(a, scaled(a, c)).percent == doctest::Approx((c - 1.0) * 100.0).epsilon(1e-9));

        const RdCurve b = random_curve(rng, 5);
        try {
            const double ab = bd_rate(a, b).percent / 100.0;
            const double ba = bd_rate(b, a).percent / 100.0;
            CHECK((1 + ab) * (1 + ba) == doctest::Approx(1.0).epsilon(1e-9));
            // Scaling both curves leaves the result unchanged.
            CHECK(bd_rate(scaled(a, c), scaled(b, c)).percent == doctest::Approx(ab * 100).epsilon(1e-9));
        } catch (const OverlapError&) {
        }
    }
}

TEST_CASE("BD-Rate error paths and warnings") {
    const RdCurve three = make_curve({100, 200, 400}, {30, 32, 34});
    CHECK_THROWS_AS(bd_rate(three, kAnchor), ArityError);
    CHECK_THROWS_AS(bd_rate(kAnchor, three), ArityError);

    const RdCurve high = make_curve({100, 200, 400, 800}, {50, 52, 54, 56});
    CHECK_THROWS_AS(bd_rate(kAnchor, high), OverlapError);

    const RdCurve bumpy = make_curve({1000, 1800, 3100, 5200, 8600}, {33.1, 36.0, 35.8, 39.8, 41.2});
    const BdRateResult r = bd_rate(kAnchor, bumpy);
    REQUIRE_FALSE(r.warnings.empty());
    CHECK(r.warnings[0].find("not monotone") != std::string::npos);
    CHECK(std::isfinite(r.percent));

    const RdCurve ssim = make_curve({1000, 1800, 3100, 5200}, {0.9, 0.93, 0.95, 0.97}, "ms_ssim");
    CHECK_THROWS_AS(bd_rate(kAnchor, ssim), OverlapError);
    const RdCurve psnr_as_ssim = make_curve({1000, 1800, 3100, 5200, 8600}, {33.1, 35.6, 37.9, 39.8, 41.2}, "ms_ssim");
    CHECK_FALSE(bd_rate(kAnchor, psnr_as_ssim).warnings.empty());
}

TEST_CASE("RD curve CSV") {
    std::stringstream ss;
    write_rd_curve_csv(kAnchor, ss);
    CHECK(ss.str().rfind("crf,rate_kbps,psnr\n", 0) == 0);
    CHECK(read_rd_curve_csv(ss) == kAnchor);

    std::istringstream unsorted("crf,rate_kbps,ms_ssim\n30,100,0.9\n21,400.5,0.97\n");
    const RdCurve c = read_rd_curve_csv(unsorted);
    CHECK(c.metric() == "ms_ssim");
    CHECK(c.points().front().rate_kbps == 100);
    CHECK(c.points().back().crf == 21);

    std::istringstream bad_header("rate,quality\n1,2\n");
    CHECK_THROWS_AS(read_rd_curve_csv(bad_header), FormatError);
    std::istringstream bad_field("crf,rate_kbps,psnr\n21,abc,30\n");
    CHECK_THROWS_AS(read_rd_curve_csv(bad_field), FormatError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_rd_curve_csv(empty), FormatError);
    CHECK_THROWS_AS(make_curve({100, 100}, {1, 2}), PreconditionError);
    CHECK_THROWS_AS(make_curve({-5, 100}, {1, 2}), PreconditionError);

    testing::TempDir dir;
    write_rd_curve_csv_file(kAnchor, dir / "c.csv");
    CHECK(read_rd_curve_csv_file(dir / "c.csv") == kAnchor);
    CHECK_THROWS_AS(read_rd_curve_csv_file(dir / "missing.csv"), IoError);
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
