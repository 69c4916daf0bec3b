#include "adasharp/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "adasharp/error.hpp"
#include "adasharp/parallel.hpp"

namespace adasharp {

namespace {

void require_same_size(const FloatPlane& a, const FloatPlane& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw DimensionError("metric inputs differ in size: " + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                             "x" + std::to_string(b.height()));
    }
}

void require_same_length(const Sequence& a, const Sequence& b) {
    if (a.size() != b.size()) {
        throw DimensionError("metric inputs differ in frame count: " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
    }
}

// Running mean; exact when every term is equal.
class RunningMean {
public:
    void add(double v) {
        ++n_;
        mean_ += (v - mean_) / static_cast<double>(n_);
    }
    double value() const noexcept { return mean_; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
};

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kPeak = 255.0;
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

std::array<double, kWindow> gaussian_window() {
    std::array<double, kWindow> w{};
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - (kWindow - 1) / 2.0;
        w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
        total += w[static_cast<std::size_t>(i)];
    }
    for (double& v : w) {
        v /= total;
    }
    return w;
}

// Separable correlation keeping only positions where the window fits.
FloatPlane filter_valid(const FloatPlane& in, const std::array<double, kWindow>& w) {
    const int ow = in.width() - kWindow + 1;
    const int oh = in.height() - kWindow + 1;
    FloatPlane tmp(ow, in.height());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += w[static_cast<std::size_t>(k)] * in.at(x + k, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    FloatPlane out(ow, oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += w[static_cast<std::size_t>(k)] * tmp.at(x, y + k);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

FloatPlane product(const FloatPlane& a, const FloatPlane& b) {
    FloatPlane out(a.width(), a.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.values()[i] = a.values()[i] * b.values()[i];
    }
    return out;
}

FloatPlane downsample_2x2(const FloatPlane& in) {
    const int ow = (in.width() + 1) / 2;
    const int oh = (in.height() + 1) / 2;
    FloatPlane out(ow, oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            out.at(x, y) = (in.clamped(2 * x, 2 * y) + in.clamped(2 * x + 1, 2 * y) +
                            in.clamped(2 * x, 2 * y + 1) + in.clamped(2 * x + 1, 2 * y + 1)) /
                           4.0;
        }
    }
    return out;
}

struct ScaleStats {
    double ssim = 0.0;  // mean of luminance * contrast-structure
    double cs = 0.0;    // mean of contrast-structure
};

ScaleStats ssim_scale(const FloatPlane& x, const FloatPlane& y,
                      const std::array<double, kWindow>& w) {
    const double c1 = (kK1 * kPeak) * (kK1 * kPeak);
    const double c2 = (kK2 * kPeak) * (kK2 * kPeak);
    const FloatPlane mu_x = filter_valid(x, w);
    const FloatPlane mu_y = filter_valid(y, w);
    const FloatPlane xx = filter_valid(product(x, x), w);
    const FloatPlane yy = filter_valid(product(y, y), w);
    const FloatPlane xy = filter_valid(product(x, y), w);

    double ssim_sum = 0.0;
    double cs_sum = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x.values()[i];
        const double my = mu_y.values()[i];
        const double var_x = xx.values()[i] - mx * mx;
        const double var_y = yy.values()[i] - my * my;
        const double cov = xy.values()[i] - mx * my;
        const double cs = (2.0 * cov + c2) / (var_x + var_y + c2);
        const double lum = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
        ssim_sum += lum * cs;
        cs_sum += cs;
    }
    const auto n = static_cast<double>(mu_x.size());
    return {ssim_sum / n, cs_sum / n};
}

}  // namespace

double Psnr::value() const noexcept {
    return infinite ? std::numeric_limits<double>::infinity() : db;
}

Psnr psnr_from_mse(double mse) {
    if (mse <= 0.0) {
        return {0.0, true};
    }
    return {10.0 * std::log10(kPeak * kPeak / mse), false};
}

double mean_squared_error(const FloatPlane& ref, const FloatPlane& dist) {
    require_same_size(ref, dist);
    double sum = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = ref.values()[i] - dist.values()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(ref.size());
}

Psnr psnr(const FloatPlane& ref, const FloatPlane& dist) {
    return psnr_from_mse(mean_squared_error(ref, dist));
}

Psnr psnr(const Frame& ref, const Frame& dist) {
    return psnr(luma_to_plane(ref), luma_to_plane(dist));
}

Psnr psnr(const Sequence& ref, const Sequence& dist) {
    require_same_length(ref, dist);
    double total = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        total += mean_squared_error(luma_to_plane(ref[i]), luma_to_plane(dist[i]));
    }
    return psnr_from_mse(total / static_cast<double>(ref.size()));
}

double ms_ssim(const FloatPlane& ref, const FloatPlane& dist) {
    require_same_size(ref, dist);
    if (std::min(ref.width(), ref.height()) < kMsSsimMinSize) {
        throw PreconditionError("MS-SSIM needs frames of at least " +
                                std::to_string(kMsSsimMinSize) + "x" +
                                std::to_string(kMsSsimMinSize) + ", got " +
                                std::to_string(ref.width()) + "x" + std::to_string(ref.height()));
    }
    const auto window = gaussian_window();
    FloatPlane x = ref;
    FloatPlane y = dist;
    double score = 1.0;
    for (std::size_t scale = 0; scale < kScaleWeights.size(); ++scale) {
        if (scale > 0) {
            x = downsample_2x2(x);
            y = downsample_2x2(y);
        }
        const ScaleStats s = ssim_scale(x, y, window);
        const bool last = scale + 1 == kScaleWeights.size();
        const double term = std::max(last ? s.ssim : s.cs, 0.0);
        score *= std::pow(term, kScaleWeights[scale]);
    }
    return score;
}

double ms_ssim(const Frame& ref, const Frame& dist) {
    return ms_ssim(luma_to_plane(ref), luma_to_plane(dist));
}

double charbonnier(const FloatPlane& ref, const FloatPlane& dist) {
    require_same_size(ref, dist);
    RunningMean mean;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = ref.values()[i] - dist.values()[i];
        mean.add(std::sqrt(d * d + kCharbonnierEpsilon * kCharbonnierEpsilon));
    }
    return mean.value();
}

double charbonnier(const Frame& ref, const Frame& dist) {
    return charbonnier(luma_to_plane(ref), luma_to_plane(dist));
}

double rd_cost(double rate_bits, double mse, double lambda) {
    if (!std::isfinite(rate_bits) || !std::isfinite(mse) || !std::isfinite(lambda)) {
        throw PreconditionError("rd_cost inputs must be finite");
    }
    return rate_bits + lambda * mse;
}

double overall_score(double l_rec, double l_rd, double gamma) {
    if (!std::isfinite(l_rec) || !std::isfinite(l_rd) || !std::isfinite(gamma)) {
        throw PreconditionError("overall_score inputs must be finite");
    }
    return l_rec + gamma * l_rd;
}

QualityReport evaluate_quality(const Sequence& ref, const Sequence& dist, int jobs) {
    require_same_length(ref, dist);
    if (ref.width() != dist.width() || ref.height() != dist.height()) {
        throw DimensionError("metric inputs differ in size");
    }
    const bool with_ms_ssim = std::min(ref.width(), ref.height()) >= kMsSsimMinSize;

    QualityReport report;
    report.frames.resize(ref.size());
    std::vector<double> mse(ref.size());
    parallel_for(ref.size(), jobs, [&](std::size_t i) {
        const FloatPlane a = luma_to_plane(ref[i]);
        const FloatPlane b = luma_to_plane(dist[i]);
        mse[i] = mean_squared_error(a, b);
        FrameQuality& q = report.frames[i];
        q.psnr = psnr_from_mse(mse[i]);
        if (with_ms_ssim) {
            q.ms_ssim = ms_ssim(a, b);
        }
        q.charbonnier = charbonnier(a, b);
    });

    RunningMean pooled_mse;
    RunningMean ssim_mean;
    RunningMean charb_mean;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        pooled_mse.add(mse[i]);
        if (with_ms_ssim) {
            ssim_mean.add(*report.frames[i].ms_ssim);
        }
        charb_mean.add(report.frames[i].charbonnier);
    }
    report.psnr = psnr_from_mse(pooled_mse.value());
    if (with_ms_ssim) {
        report.ms_ssim = ssim_mean.value();
    }
    report.charbonnier = charb_mean.value();
    return report;
}

nlohmann::json to_json(const Psnr& p) {
    return p.infinite ? nlohmann::json{{"db", nullptr}, {"infinite", true}}
                      : nlohmann::json{{"db", p.db}, {"infinite", false}};
}

nlohmann::json to_json(const QualityReport& report) {
    auto optional_number = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json frames = nlohmann::json::array();
    for (const FrameQuality& q : report.frames) {
        frames.push_back({{"psnr", to_json(q.psnr)},
                          {"ms_ssim", optional_number(q.ms_ssim)},
                          {"charbonnier", q.charbonnier}});
    }
    return {{"frames", frames},
            {"psnr", to_json(report.psnr)},
            {"ms_ssim", optional_number(report.ms_ssim)},
            {"charbonnier", report.charbonnier}};
}

bool is_rd_metric(const std::string& name) { return name == "psnr" || name == "ms_ssim"; }

double sequence_metric(const std::string& name, const Sequence& ref, const Sequence& dist,
                       int jobs) {
    if (name == "psnr") {
        return psnr(ref, dist).value();
    }
    if (name == "ms_ssim") {
        require_same_length(ref, dist);
        std::vector<double> values(ref.size());
        parallel_for(ref.size(), jobs, [&](std::size_t i) { values[i] = ms_ssim(ref[i], dist[i]); });
        RunningMean mean;
        for (double v : values) {
            mean.add(v);
        }
        return mean.value();
    }
    throw PreconditionError("unknown RD metric '" + name + "' (expected psnr or ms_ssim)");
}

}  // namespace adasharp
