// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dfsq/kmeans.hpp"
#include "dfsq/tensor.hpp"
#include "dfsq/universal_set.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dfsq {

inline constexpr std::uint64_t kDefaultCombinationBudget = 10'000'000;

/// The 2^b quantization points chosen for one channel, strictly ascending.
struct QuantPointSet {
    std::vector<double> points;
    int bitwidth = 0;
};

/// Per-(sample, channel) normalization statistics plus the selected points.
struct ChannelQuantParams {
    double mean = 0.0;
    double scale = 0.0; // max |x - mean|; 0 flags a constant channel
    QuantPointSet points;
};

enum class SelectionMode { Fast, Exhaustive, StaticCalibrated };

struct QuantMode {
    bool channel_wise = true;
    bool normalized = true;
    SelectionMode selection = SelectionMode::Fast;
    std::uint64_t combination_budget = kDefaultCombinationBudget;
};

/// Centers a channel on its mean and scales by the maximum absolute
/// deviation, mapping it into [-1, 1] with at least one element hitting +-1.
/// A channel with max deviation below 1e-12 normalizes to all zeros with
/// scale 0. Returns {mean, scale}.
struct ChannelStats {
    double mean = 0.0;
    double scale = 0.0;
};
ChannelStats normalize_channel(std::span<const float> x, std::span<float> out);

/// Inverse map out[i] = xq[i] * scale + mean.
void denormalize_channel(std::span<const float> xq, double mean, double scale,
                         std::span<float> out);

/// Nearest selected point; an exact midpoint resolves to the smaller point.
float sq_quantize_value(float x, std::span<const double> points);
void sq_quantize(std::span<const float> in, const QuantPointSet& points, std::span<float> out);

/// Sum of squared quantization errors of `data` against a point set.
double sq_loss(std::span<const float> data, std::span<const double> points);

/// Each ascending centroid takes its nearest not-yet-used universal value
/// (midpoint ties to the smaller value), so exactly centroids.size() distinct
/// points come back, ascending. The n-dependent phase of fast selection.
std::vector<double> snap_centroids(std::span<const double> centroids,
                                   std::span<const double> universal_values);

/// K-means (best of config.trials) with K = 2^bitwidth, centroids snapped to
/// the universal set. `iterations_out`, when non-null, receives the winning
/// run's iteration count.
QuantPointSet select_points_fast(std::span<const float> values, const UniversalSet& universal,
                                 int bitwidth, const KMeansConfig& config,
                                 std::size_t* iterations_out = nullptr);

/// Minimum-loss size-2^bitwidth subset of the universal set, by exhaustive
/// enumeration; loss ties resolve to the lexicographically smallest sorted
/// subset. Refuses (with the exact combination count) when C(n, 2^b) exceeds
/// the budget.
QuantPointSet select_points_exhaustive(std::span<const float> values,
                                       const UniversalSet& universal, int bitwidth,
                                       std::uint64_t combination_budget = kDefaultCombinationBudget);

/// Quantization points fitted once on calibration data and reused across
/// samples (SelectionMode::StaticCalibrated).
struct CalibrationTable {
    bool channel_wise = true;
    std::vector<QuantPointSet> entries; // per channel, or a single pooled entry
    std::vector<std::size_t> kmeans_iterations;
};
CalibrationTable calibrate_points(const Tensor& calib, const UniversalSet& universal,
                                  int bitwidth, const QuantMode& mode,
                                  const KMeansConfig& config);

struct ChannelReport {
    std::uint64_t sample = 0;
    std::int64_t channel = 0; // -1 when statistics pool a whole sample
    double mean = 0.0;
    double scale = 0.0;
    std::vector<double> points;
    double mse = 0.0;
    double sse = 0.0;
    std::size_t kmeans_iterations = 0;
};

struct QuantizeReport {
    std::vector<ChannelReport> channels;
    double total_mse = 0.0;
    double max_channel_mse = 0.0;
    double wall_time_ms = 0.0;
    nlohmann::json to_json() const;
};

/// Full fake-quantization pipeline over a (B, C, H, W) tensor: per-unit
/// normalize -> select points -> quantize -> de-normalize. Work units are
/// (sample, channel) when mode.channel_wise, whole samples otherwise; with
/// mode.normalized off the raw values are quantized directly. Per-unit seeds
/// derive from (config.seed, sample, channel), so results are identical for
/// any thread count (threads = 0 picks hardware concurrency).
std::pair<Tensor, QuantizeReport> quantize_activation_tensor(
    const Tensor& t, const UniversalSet& universal, int bitwidth, const QuantMode& mode,
    const KMeansConfig& config, const CalibrationTable* calibration = nullptr,
    unsigned threads = 1);

struct WeightQuantParams {
    double step = 1.0;
    std::int64_t zero_point = 0;
    int bitwidth = 0;
    double low = 0.0;
    double high = 0.0;
    bool constant_kernel = false;
};

struct WeightQuantResult {
    std::vector<std::int32_t> q; // in [0, 2^b - 1]
    WeightQuantParams params;
};

/// Kernel-wise linear uniform quantization: s = (max - min) / (2^b - 1),
/// Z = round(-min / s), q = clamp(round(w / s) + Z). Rounding is half away
/// from zero. A constant kernel is flagged and maps to all-zero codes with
/// s = 1, Z = 0.
WeightQuantResult quantize_weight_kernel(std::span<const float> w, int bitwidth);

/// s * (q - Z). Codes outside [0, 2^b - 1] are rejected.
std::vector<float> dequantize_weight_kernel(std::span<const std::int32_t> wq,
                                            const WeightQuantParams& params);

struct MinMaxReport {
    bool constant_tensor = false;
    double low = 0.0;
    double high = 0.0;
    double step = 0.0;
};

/// Layer-wise min-max baseline: fake quantization on the uniform grid
/// low + step * q spanning [min, max] of the whole tensor, so the endpoints
/// are representable exactly. A constant tensor passes through unchanged.
std::pair<Tensor, MinMaxReport> minmax_uniform_activation(const Tensor& t, int bitwidth);

} // namespace dfsq
