// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dfsq/image.hpp"
#include "dfsq/tensor.hpp"

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dfsq {

struct MetricReport {
    double psnr = 0.0; // dB, +infinity for identical inputs
    double ssim = 0.0;
    double mse = 0.0;  // over the Y channel, shaved
    int shave = 0;
    nlohmann::json to_json() const;
};

/// BT.601 studio-swing luma: Y = 16 + (65.481 R + 128.553 G + 24.966 B) / 255,
/// rounded half away from zero and clamped to [0, 255]. Rejects non-RGB input.
Image rgb_to_y(const Image& img);

/// PSNR in dB over the Y channel (RGB inputs are converted), with a border of
/// `shave` pixels removed on all sides first. +infinity when identical.
double psnr_y(const Image& a, const Image& b, int shave = 0);

/// Single-scale SSIM over the Y channel: 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, L = 255, averaged over windows fully inside the
/// image. Both images must be at least 11x11.
double ssim_y(const Image& a, const Image& b);

/// PSNR + SSIM + MSE on the shave-cropped Y channels.
MetricReport compute_metrics(const Image& reference, const Image& test, int shave);

struct QuantErrorStats {
    struct Channel {
        std::uint64_t sample = 0;
        std::uint64_t channel = 0;
        double mse = 0.0;
        double sse = 0.0;
        double max_abs_error = 0.0;
    };
    std::vector<Channel> channels;
    double total_mse = 0.0;
    double total_sse = 0.0;
    double max_abs_error = 0.0;
    nlohmann::json to_json() const;
};

/// Per-channel and aggregate error statistics between same-shape tensors.
QuantErrorStats quant_error_stats(const Tensor& original, const Tensor& quantized);

} // namespace dfsq
