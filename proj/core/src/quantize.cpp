// SPDX-License-Identifier: Apache-2.0
#include "dfsq/quantize.hpp"

#include "dfsq/combinatorics.hpp"
#include "dfsq/errors.hpp"
#include "dfsq/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace dfsq {

namespace {

// Seed coordinate for units that pool a whole sample, and for calibration
// fits (which pool across samples).
constexpr std::uint64_t kPooledUnit = ~std::uint64_t{0};

void require_finite(std::span<const float> x, const char* who) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]))
            throw ValidationError(std::string(who) + ": element " + std::to_string(i) +
                                  " is not finite");
}

std::size_t nearest_index(double x, std::span<const double> points) {
    const auto it = std::lower_bound(points.begin(), points.end(), x);
    if (it == points.begin()) return 0;
    if (it == points.end()) return points.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - points.begin());
    const double d_left = x - points[hi - 1];
    const double d_right = points[hi] - x;
    return d_left <= d_right ? hi - 1 : hi; // midpoint ties to the smaller point
}

// Sorted copy plus prefix sums; evaluates subset losses in O(k log n).
struct LossEvaluator {
    std::vector<double> xs, s1, s2;

    explicit LossEvaluator(std::span<const float> data) {
        xs.assign(data.begin(), data.end());
        std::sort(xs.begin(), xs.end());
        s1.assign(xs.size() + 1, 0.0);
        s2.assign(xs.size() + 1, 0.0);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            s1[i + 1] = s1[i] + xs[i];
            s2[i + 1] = s2[i] + xs[i] * xs[i];
        }
    }

    double loss(std::span<const double> pts) const {
        double total = 0.0;
        std::size_t lo = 0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            std::size_t hi;
            if (j + 1 < pts.size()) {
                const double mid = 0.5 * (pts[j] + pts[j + 1]);
                hi = static_cast<std::size_t>(
                    std::upper_bound(xs.begin() + static_cast<std::ptrdiff_t>(lo), xs.end(), mid) -
                    xs.begin());
            } else {
                hi = xs.size();
            }
            if (hi > lo) {
                const double cnt = static_cast<double>(hi - lo);
                const double p = pts[j];
                total += (s2[hi] - s2[lo]) - 2.0 * p * (s1[hi] - s1[lo]) + p * p * cnt;
            }
            lo = hi;
        }
        return std::max(total, 0.0);
    }
};

void validate_point_set(const QuantPointSet& points) {
    if (points.points.empty()) throw ValidationError("quantization point set is empty");
    for (std::size_t i = 1; i < points.points.size(); ++i)
        if (!(points.points[i - 1] < points.points[i]))
            throw ValidationError("quantization points must be strictly ascending");
}

std::size_t check_bitwidth(const UniversalSet& universal, int bitwidth) {
    if (bitwidth < 1 || bitwidth > 24)
        throw ValidationError("bitwidth must be in [1, 24], got " + std::to_string(bitwidth));
    const std::size_t k = std::size_t{1} << bitwidth;
    if (universal.size() < k)
        throw ValidationError("universal set has " + std::to_string(universal.size()) +
                              " points, fewer than 2^" + std::to_string(bitwidth) + " = " +
                              std::to_string(k));
    return k;
}

} // namespace

ChannelStats normalize_channel(std::span<const float> x, std::span<float> out) {
    if (x.empty()) throw ValidationError("normalize_channel: empty input");
    if (out.size() != x.size()) throw ValidationError("normalize_channel: size mismatch");
    require_finite(x, "normalize_channel");

    double sum = 0.0;
    for (float v : x) sum += v;
    const double mean = sum / static_cast<double>(x.size());
    double scale = 0.0;
    for (float v : x) scale = std::max(scale, std::abs(v - mean));

    ChannelStats stats;
    stats.mean = mean;
    if (scale < 1e-12) {
        std::fill(out.begin(), out.end(), 0.0f);
        stats.scale = 0.0;
        return stats;
    }
    stats.scale = scale;
    const double inv = 1.0 / scale;
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = static_cast<float>((x[i] - mean) * inv);
    return stats;
}

void denormalize_channel(std::span<const float> xq, double mean, double scale,
                         std::span<float> out) {
    if (out.size() != xq.size()) throw ValidationError("denormalize_channel: size mismatch");
    for (std::size_t i = 0; i < xq.size(); ++i)
        out[i] = static_cast<float>(static_cast<double>(xq[i]) * scale + mean);
}

float sq_quantize_value(float x, std::span<const double> points) {
    if (points.empty()) throw ValidationError("sq_quantize: empty point set");
    return static_cast<float>(points[nearest_index(x, points)]);
}

void sq_quantize(std::span<const float> in, const QuantPointSet& points, std::span<float> out) {
    validate_point_set(points);
    if (out.size() != in.size()) throw ValidationError("sq_quantize: size mismatch");
    const std::span<const double> pts(points.points);
    for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = static_cast<float>(pts[nearest_index(in[i], pts)]);
}

double sq_loss(std::span<const float> data, std::span<const double> points) {
    if (points.empty()) throw ValidationError("sq_loss: empty point set");
    return LossEvaluator(data).loss(points);
}

std::vector<double> snap_centroids(std::span<const double> centroids,
                                   std::span<const double> universal_values) {
    const std::size_t n = universal_values.size();
    if (centroids.size() > n)
        throw ValidationError("snap_centroids: more centroids than universal points");

    std::vector<char> used(n, 0);
    std::vector<double> selected;
    selected.reserve(centroids.size());
    std::vector<double> sorted_centroids(centroids.begin(), centroids.end());
    std::sort(sorted_centroids.begin(), sorted_centroids.end());

    // Plain nearest-unused scan per centroid; the ascending scan with strict
    // improvement sends midpoint ties to the smaller value.
    for (double c : sorted_centroids) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            const double d = std::abs(universal_values[i] - c);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        used[best] = 1;
        selected.push_back(universal_values[best]);
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

QuantPointSet select_points_fast(std::span<const float> values, const UniversalSet& universal,
                                 int bitwidth, const KMeansConfig& config,
                                 std::size_t* iterations_out) {
    const std::size_t k = check_bitwidth(universal, bitwidth);
    KMeansConfig cfg = config;
    cfg.k = k;
    const KMeansResult best = kmeans_best_of_trials(values, cfg);
    if (iterations_out) *iterations_out = best.iterations;

    QuantPointSet result;
    result.bitwidth = bitwidth;
    result.points = snap_centroids(best.centroids, universal.values());
    return result;
}

QuantPointSet select_points_exhaustive(std::span<const float> values,
                                       const UniversalSet& universal, int bitwidth,
                                       std::uint64_t combination_budget) {
    const std::size_t k = check_bitwidth(universal, bitwidth);
    const unsigned n = static_cast<unsigned>(universal.size());
    if (binomial_exceeds(n, static_cast<unsigned>(k), combination_budget)) {
        const std::string count = binomial_str(n, static_cast<unsigned>(k));
        throw ValidationError("exhaustive selection refused: combination count C(" +
                              std::to_string(n) + ", " + std::to_string(k) + ") = " + count +
                              " (" + decimal_to_scientific(count, 4) + ") exceeds budget " +
                              std::to_string(combination_budget));
    }
    if (values.empty()) throw ValidationError("select_points_exhaustive: empty data");
    require_finite(values, "select_points_exhaustive");

    const LossEvaluator eval(values);
    const std::span<const double> uni(universal.values());

    // Lexicographic combination enumeration; strict improvement keeps the
    // lexicographically smallest subset among loss ties.
    std::vector<std::size_t> idx(k);
    for (std::size_t j = 0; j < k; ++j) idx[j] = j;
    std::vector<double> pts(k), best_pts;
    double best_loss = std::numeric_limits<double>::infinity();
    for (;;) {
        for (std::size_t j = 0; j < k; ++j) pts[j] = uni[idx[j]];
        const double loss = eval.loss(pts);
        if (loss < best_loss) {
            best_loss = loss;
            best_pts = pts;
        }
        // Advance to the next combination.
        std::size_t j = k;
        while (j-- > 0) {
            if (idx[j] != j + n - k) {
                ++idx[j];
                for (std::size_t l = j + 1; l < k; ++l) idx[l] = idx[l - 1] + 1;
                break;
            }
            if (j == 0) {
                QuantPointSet result;
                result.bitwidth = bitwidth;
                result.points = std::move(best_pts);
                return result;
            }
        }
    }
}

CalibrationTable calibrate_points(const Tensor& calib, const UniversalSet& universal,
                                  int bitwidth, const QuantMode& mode,
                                  const KMeansConfig& config) {
    if (calib.size() == 0) throw ValidationError("calibrate_points: empty calibration tensor");
    CalibrationTable table;
    table.channel_wise = mode.channel_wise;

    const std::uint64_t units = mode.channel_wise ? calib.channels() : 1;
    for (std::uint64_t c = 0; c < units; ++c) {
        std::vector<float> pooled;
        for (std::uint64_t i = 0; i < calib.batch(); ++i) {
            const auto src = mode.channel_wise ? calib.channel(i, c) : calib.sample(i);
            const std::size_t off = pooled.size();
            pooled.resize(off + src.size());
            if (mode.normalized) {
                normalize_channel(src, std::span<float>(pooled).subspan(off));
            } else {
                std::copy(src.begin(), src.end(), pooled.begin() + static_cast<std::ptrdiff_t>(off));
            }
        }
        KMeansConfig cfg = config;
        cfg.seed = derive_seed(config.seed, kPooledUnit, c);
        std::size_t iters = 0;
        table.entries.push_back(select_points_fast(pooled, universal, bitwidth, cfg, &iters));
        table.kmeans_iterations.push_back(iters);
    }
    return table;
}

nlohmann::json QuantizeReport::to_json() const {
    nlohmann::json chans = nlohmann::json::array();
    for (const auto& ch : channels) {
        chans.push_back({{"sample", ch.sample},
                         {"channel", ch.channel},
                         {"mean", ch.mean},
                         {"scale", ch.scale},
                         {"points", ch.points},
                         {"mse", ch.mse},
                         {"sse", ch.sse},
                         {"kmeans_iterations", ch.kmeans_iterations}});
    }
    return nlohmann::json{{"channels", std::move(chans)},
                          {"aggregate",
                           {{"total_mse", total_mse},
                            {"max_channel_mse", max_channel_mse},
                            {"wall_time_ms", wall_time_ms}}}};
}

namespace {

struct WorkUnit {
    std::uint64_t sample = 0;
    std::uint64_t channel = 0; // ignored when pooled
    bool pooled = false;
};

void run_parallel(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
    if (threads <= 1) {
        for (std::size_t j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t j = t; j < jobs; j += threads) fn(j);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

std::pair<Tensor, QuantizeReport> quantize_activation_tensor(
    const Tensor& t, const UniversalSet& universal, int bitwidth, const QuantMode& mode,
    const KMeansConfig& config, const CalibrationTable* calibration, unsigned threads) {
    if (t.shape[0] == 0 || t.shape[1] == 0 || t.shape[2] == 0 || t.shape[3] == 0)
        throw ValidationError("quantize_activation_tensor: tensor has an empty dimension");
    if (t.data.size() != static_cast<std::size_t>(t.shape[0] * t.shape[1] * t.shape[2] * t.shape[3]))
        throw ValidationError("quantize_activation_tensor: data length does not match shape");
    if (mode.selection == SelectionMode::StaticCalibrated) {
        if (!calibration)
            throw ValidationError("static-calibrated selection requires a calibration table");
        if (calibration->channel_wise != mode.channel_wise)
            throw ValidationError("calibration table granularity does not match mode");
        if (mode.channel_wise && calibration->entries.size() != t.channels())
            throw ValidationError("calibration table has " +
                                  std::to_string(calibration->entries.size()) +
                                  " entries for " + std::to_string(t.channels()) + " channels");
    }

    const auto t0 = std::chrono::steady_clock::now();

    std::vector<WorkUnit> units;
    if (mode.channel_wise) {
        for (std::uint64_t i = 0; i < t.batch(); ++i)
            for (std::uint64_t c = 0; c < t.channels(); ++c) units.push_back({i, c, false});
    } else {
        for (std::uint64_t i = 0; i < t.batch(); ++i) units.push_back({i, 0, true});
    }

    Tensor out = t; // shape copy; data overwritten per unit
    QuantizeReport report;
    report.channels.resize(units.size());

    run_parallel(units.size(), threads, [&](std::size_t j) {
        const WorkUnit& u = units[j];
        const auto src = u.pooled ? t.sample(u.sample) : t.channel(u.sample, u.channel);
        const auto dst = u.pooled ? out.sample(u.sample) : out.channel(u.sample, u.channel);

        ChannelReport& ch = report.channels[j];
        ch.sample = u.sample;
        ch.channel = u.pooled ? -1 : static_cast<std::int64_t>(u.channel);

        std::vector<float> work(src.size());
        double mean = 0.0, scale = 1.0;
        bool degenerate = false;
        if (mode.normalized) {
            const ChannelStats stats = normalize_channel(src, work);
            mean = stats.mean;
            scale = stats.scale;
            degenerate = stats.scale == 0.0;
        } else {
            require_finite(src, "quantize_activation_tensor");
            std::copy(src.begin(), src.end(), work.begin());
            mean = 0.0;
            scale = 1.0;
        }
        ch.mean = mean;
        ch.scale = mode.normalized ? scale : 1.0;

        if (degenerate) {
            // Constant channel: quantization is lossless, emit the mean.
            const float v = static_cast<float>(mean);
            std::fill(dst.begin(), dst.end(), v);
        } else {
            QuantPointSet points;
            if (mode.selection == SelectionMode::StaticCalibrated) {
                const std::size_t entry = mode.channel_wise ? u.channel : 0;
                points = calibration->entries[entry];
                ch.kmeans_iterations = calibration->kmeans_iterations[entry];
            } else if (mode.selection == SelectionMode::Fast) {
                KMeansConfig cfg = config;
                cfg.seed = derive_seed(config.seed, u.sample, u.pooled ? kPooledUnit : u.channel);
                std::size_t iters = 0;
                points = select_points_fast(work, universal, bitwidth, cfg, &iters);
                ch.kmeans_iterations = iters;
            } else {
                points = select_points_exhaustive(work, universal, bitwidth,
                                                  mode.combination_budget);
            }
            ch.points = points.points;

            sq_quantize(work, points, work);
            if (mode.normalized) {
                denormalize_channel(work, mean, scale, dst);
            } else {
                std::copy(work.begin(), work.end(), dst.begin());
            }
        }

        double sse = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i) {
            const double d = static_cast<double>(src[i]) - static_cast<double>(dst[i]);
            sse += d * d;
        }
        ch.sse = sse;
        ch.mse = sse / static_cast<double>(src.size());
    });

    double total_sse = 0.0;
    for (const auto& ch : report.channels) {
        total_sse += ch.sse;
        report.max_channel_mse = std::max(report.max_channel_mse, ch.mse);
    }
    report.total_mse = total_sse / static_cast<double>(t.size());
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(out), std::move(report)};
}

WeightQuantResult quantize_weight_kernel(std::span<const float> w, int bitwidth) {
    if (bitwidth < 2 || bitwidth > 24)
        throw ValidationError("quantize_weight_kernel: bitwidth must be in [2, 24]");
    if (w.empty()) throw ValidationError("quantize_weight_kernel: empty kernel");
    require_finite(w, "quantize_weight_kernel");

    const auto [lo_it, hi_it] = std::minmax_element(w.begin(), w.end());
    const double low = *lo_it, high = *hi_it;
    const std::int64_t qmax = (std::int64_t{1} << bitwidth) - 1;

    WeightQuantResult result;
    result.params.bitwidth = bitwidth;
    result.params.low = low;
    result.params.high = high;
    if (low == high) {
        result.params.step = 1.0;
        result.params.zero_point = 0;
        result.params.constant_kernel = true;
        result.q.assign(w.size(), 0);
        return result;
    }

    const double step = (high - low) / static_cast<double>(qmax);
    const std::int64_t zero_point = std::llround(-low / step); // round half away from zero
    result.params.step = step;
    result.params.zero_point = zero_point;
    result.q.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const std::int64_t q = std::llround(static_cast<double>(w[i]) / step) + zero_point;
        result.q[i] = static_cast<std::int32_t>(std::clamp<std::int64_t>(q, 0, qmax));
    }
    return result;
}

std::vector<float> dequantize_weight_kernel(std::span<const std::int32_t> wq,
                                            const WeightQuantParams& params) {
    const std::int64_t qmax = (std::int64_t{1} << params.bitwidth) - 1;
    std::vector<float> out(wq.size());
    for (std::size_t i = 0; i < wq.size(); ++i) {
        if (wq[i] < 0 || wq[i] > qmax)
            throw ValidationError("dequantize_weight_kernel: code " + std::to_string(wq[i]) +
                                  " outside [0, " + std::to_string(qmax) + "]");
        out[i] = static_cast<float>(params.step *
                                    (static_cast<double>(wq[i]) - static_cast<double>(params.zero_point)));
    }
    return out;
}

std::pair<Tensor, MinMaxReport> minmax_uniform_activation(const Tensor& t, int bitwidth) {
    if (bitwidth < 1 || bitwidth > 24)
        throw ValidationError("minmax_uniform_activation: bitwidth must be in [1, 24]");
    if (t.data.empty()) throw ValidationError("minmax_uniform_activation: empty tensor");
    require_finite(t.data, "minmax_uniform_activation");

    const auto [lo_it, hi_it] = std::minmax_element(t.data.begin(), t.data.end());
    const double low = *lo_it, high = *hi_it;

    MinMaxReport report;
    report.low = low;
    report.high = high;
    Tensor out = t;
    if (low == high) {
        report.constant_tensor = true;
        report.step = 0.0;
        return {std::move(out), report};
    }

    const double qmax = static_cast<double>((std::int64_t{1} << bitwidth) - 1);
    const double step = (high - low) / qmax;
    report.step = step;
    for (auto& v : out.data) {
        const double q =
            std::clamp(std::round((static_cast<double>(v) - low) / step), 0.0, qmax);
        v = static_cast<float>(low + step * q);
    }
    return {std::move(out), report};
}

} // namespace dfsq
