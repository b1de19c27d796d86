// SPDX-License-Identifier: Apache-2.0
#include "dfsq/metrics.hpp"

#include "dfsq/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace dfsq {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kL = 255.0;

Image to_y(const Image& img) { return img.channels == 3 ? rgb_to_y(img) : img; }

void require_same_size(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("image dimensions differ: " + std::to_string(a.width) + "x" +
                              std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                              std::to_string(b.height));
}

double mse_gray(const Image& a, const Image& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(a.pixels.size());
}

double psnr_from_mse(double mse) {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(kL * kL / mse);
}

const std::array<double, kWindow * kWindow>& gaussian_window() {
    static const auto window = [] {
        std::array<double, kWindow * kWindow> w{};
        const int half = kWindow / 2;
        double total = 0.0;
        for (int y = 0; y < kWindow; ++y)
            for (int x = 0; x < kWindow; ++x) {
                const double dx = x - half, dy = y - half;
                w[static_cast<std::size_t>(y * kWindow + x)] =
                    std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
                total += w[static_cast<std::size_t>(y * kWindow + x)];
            }
        for (auto& v : w) v /= total;
        return w;
    }();
    return window;
}

} // namespace

Image rgb_to_y(const Image& img) {
    if (img.channels != 3)
        throw ValidationError("rgb_to_y: input has " + std::to_string(img.channels) +
                              " channel(s), expected 3");
    Image y = Image::make(img.width, img.height, 1);
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        const double r = img.pixels[3 * p + 0];
        const double g = img.pixels[3 * p + 1];
        const double b = img.pixels[3 * p + 2];
        const double v = 16.0 + (65.481 * r + 128.553 * g + 24.966 * b) / 255.0;
        y.pixels[p] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
    return y;
}

double psnr_y(const Image& a, const Image& b, int shave) {
    require_same_size(a, b);
    if (shave < 0) throw ValidationError("psnr_y: negative shave");
    Image ya = to_y(a), yb = to_y(b);
    if (shave > 0) {
        ya = crop_border(ya, static_cast<std::uint32_t>(shave));
        yb = crop_border(yb, static_cast<std::uint32_t>(shave));
    }
    return psnr_from_mse(mse_gray(ya, yb));
}

double ssim_y(const Image& a, const Image& b) {
    require_same_size(a, b);
    const Image ya = to_y(a), yb = to_y(b);
    if (ya.width < kWindow || ya.height < kWindow)
        throw ValidationError("ssim_y: image smaller than the " + std::to_string(kWindow) + "x" +
                              std::to_string(kWindow) + " window");

    const auto& w = gaussian_window();
    const double c1 = (kK1 * kL) * (kK1 * kL);
    const double c2 = (kK2 * kL) * (kK2 * kL);

    double total = 0.0;
    std::size_t windows = 0;
    for (std::uint32_t y0 = 0; y0 + kWindow <= ya.height; ++y0) {
        for (std::uint32_t x0 = 0; x0 + kWindow <= ya.width; ++x0) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int y = 0; y < kWindow; ++y)
                for (int x = 0; x < kWindow; ++x) {
                    const double wv = w[static_cast<std::size_t>(y * kWindow + x)];
                    mu_a += wv * ya.at(x0 + static_cast<std::uint32_t>(x),
                                       y0 + static_cast<std::uint32_t>(y));
                    mu_b += wv * yb.at(x0 + static_cast<std::uint32_t>(x),
                                       y0 + static_cast<std::uint32_t>(y));
                }
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (int y = 0; y < kWindow; ++y)
                for (int x = 0; x < kWindow; ++x) {
                    const double wv = w[static_cast<std::size_t>(y * kWindow + x)];
                    const double da = ya.at(x0 + static_cast<std::uint32_t>(x),
                                            y0 + static_cast<std::uint32_t>(y)) -
                                      mu_a;
                    const double db = yb.at(x0 + static_cast<std::uint32_t>(x),
                                            y0 + static_cast<std::uint32_t>(y)) -
                                      mu_b;
                    var_a += wv * da * da;
                    var_b += wv * db * db;
                    cov += wv * da * db;
                }
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            ++windows;
        }
    }
    return total / static_cast<double>(windows);
}

MetricReport compute_metrics(const Image& reference, const Image& test, int shave) {
    require_same_size(reference, test);
    if (shave < 0) throw ValidationError("compute_metrics: negative shave");
    Image ya = to_y(reference), yb = to_y(test);
    if (shave > 0) {
        ya = crop_border(ya, static_cast<std::uint32_t>(shave));
        yb = crop_border(yb, static_cast<std::uint32_t>(shave));
    }
    MetricReport report;
    report.shave = shave;
    report.mse = mse_gray(ya, yb);
    report.psnr = psnr_from_mse(report.mse);
    report.ssim = ssim_y(ya, yb);
    return report;
}

nlohmann::json MetricReport::to_json() const {
    return nlohmann::json{
        {"psnr", std::isinf(psnr) ? nlohmann::json("inf") : nlohmann::json(psnr)},
        {"ssim", ssim},
        {"mse", mse},
        {"shave", shave}};
}

QuantErrorStats quant_error_stats(const Tensor& original, const Tensor& quantized) {
    if (original.shape != quantized.shape)
        throw ValidationError("quant_error_stats: tensor shapes differ");
    QuantErrorStats stats;
    double total_sse = 0.0;
    for (std::uint64_t i = 0; i < original.batch(); ++i) {
        for (std::uint64_t c = 0; c < original.channels(); ++c) {
            const auto a = original.channel(i, c);
            const auto b = quantized.channel(i, c);
            QuantErrorStats::Channel ch;
            ch.sample = i;
            ch.channel = c;
            for (std::size_t j = 0; j < a.size(); ++j) {
                const double d = static_cast<double>(a[j]) - static_cast<double>(b[j]);
                ch.sse += d * d;
                ch.max_abs_error = std::max(ch.max_abs_error, std::abs(d));
            }
            ch.mse = ch.sse / static_cast<double>(a.size());
            total_sse += ch.sse;
            stats.max_abs_error = std::max(stats.max_abs_error, ch.max_abs_error);
            stats.channels.push_back(ch);
        }
    }
    stats.total_sse = total_sse;
    stats.total_mse = total_sse / static_cast<double>(original.size());
    return stats;
}

nlohmann::json QuantErrorStats::to_json() const {
    nlohmann::json chans = nlohmann::json::array();
    for (const auto& ch : channels)
        chans.push_back({{"sample", ch.sample},
                         {"channel", ch.channel},
                         {"mse", ch.mse},
                         {"sse", ch.sse},
                         {"max_abs_error", ch.max_abs_error}});
    return nlohmann::json{{"channels", std::move(chans)},
                          {"total_mse", total_mse},
                          {"total_sse", total_sse},
                          {"max_abs_error", max_abs_error}};
}

} // namespace dfsq
