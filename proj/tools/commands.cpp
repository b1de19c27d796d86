// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "dfsq/combinatorics.hpp"
#include "dfsq/errors.hpp"
#include "dfsq/image.hpp"
#include "dfsq/kmeans.hpp"
#include "dfsq/metrics.hpp"
#include "dfsq/quantize.hpp"
#include "dfsq/rng.hpp"
#include "dfsq/synthetic.hpp"
#include "dfsq/tensor_io.hpp"
#include "dfsq/universal_set.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>

namespace dfsq::cli {

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError(IoError::Kind::OpenFailed, "cannot open " + path);
    nlohmann::json j;
    is >> j;
    return j;
}

UniversalSetConfig load_config(const std::string& config_path, const std::string& setting) {
    if (!config_path.empty()) return UniversalSetConfig::from_json(load_json(config_path));
    return builtin_setting(setting);
}

// Set to quantize with: explicit value file wins, otherwise a built-in.
UniversalSet load_set(const std::string& set_path, const std::string& setting) {
    if (!set_path.empty()) return UniversalSet::from_json(load_json(set_path));
    return generate_universal_set(builtin_setting(setting));
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot create " + path);
    os << text;
    if (!os) throw IoError(IoError::Kind::WriteFailed, "write failed: " + path);
}

double median_ms(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

template <typename Fn>
double time_ms(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string format_double(double v) {
    return nlohmann::json(v).dump();
}

} // namespace

int run_genset(const GensetOptions& opts) {
    UniversalSetConfig config = load_config(opts.config_path, opts.setting);
    if (opts.config_path.empty()) config.include_negatives = opts.negatives;
    const UniversalSet set = generate_universal_set(config);

    if (!opts.out_path.empty()) write_text(opts.out_path, set.to_json().dump() + "\n");
    if (!opts.csv_path.empty()) {
        std::ofstream os(opts.csv_path, std::ios::trunc);
        if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot create " + opts.csv_path);
        set.write_csv(os);
    }

    const HardwareFriendlinessReport report = verify_hardware_friendly(set, config);
    std::cout << set.size() << " points\n";
    if (report.all_ok) {
        std::cout << "hardware-friendly: PASS (" << report.entries.size() << "/"
                  << report.entries.size() << " points decompose)\n";
    } else {
        std::cout << "hardware-friendly: FAIL (" << report.violations.size()
                  << " point(s) have no word-set decomposition)\n";
        for (double v : report.violations) std::cout << "  violating point: " << v << "\n";
        return 1;
    }
    return 0;
}

int run_quantize(const QuantizeOptions& opts) {
    const Tensor input = read_tensor(opts.in_path);
    const UniversalSet set = load_set(opts.set_path, opts.setting);

    QuantMode mode;
    mode.channel_wise = !opts.layer_wise;
    mode.normalized = !opts.no_norm;
    mode.combination_budget = opts.budget;
    if (opts.mode == "fast") {
        mode.selection = SelectionMode::Fast;
    } else if (opts.mode == "exhaustive") {
        mode.selection = SelectionMode::Exhaustive;
    } else {
        mode.selection = SelectionMode::StaticCalibrated;
    }

    KMeansConfig kcfg;
    kcfg.seed = opts.seed;
    kcfg.trials = opts.trials;
    kcfg.max_iters = opts.max_iters;
    kcfg.tol = opts.tol;

    CalibrationTable table;
    const CalibrationTable* table_ptr = nullptr;
    if (mode.selection == SelectionMode::StaticCalibrated) {
        if (opts.calib_path.empty())
            throw ValidationError("--mode static requires --calib <tensor>");
        const Tensor calib = read_tensor(opts.calib_path);
        table = calibrate_points(calib, set, opts.bits, mode, kcfg);
        table_ptr = &table;
    }

    auto [quantized, report] =
        quantize_activation_tensor(input, set, opts.bits, mode, kcfg, table_ptr, opts.threads);
    write_tensor(quantized, opts.out_path);
    write_text(opts.report_path, report.to_json().dump(2) + "\n");
    return 0;
}

int run_select(const SelectOptions& opts) {
    const Tensor input = read_tensor(opts.in_path);
    const UniversalSet set = load_set(opts.set_path, opts.setting);

    std::vector<float> values(input.data);
    double mean = 0.0, scale = 1.0;
    if (opts.normalize) {
        const ChannelStats stats = normalize_channel(input.data, values);
        mean = stats.mean;
        scale = stats.scale;
    }

    QuantPointSet points;
    std::size_t iterations = 0;
    if (opts.mode == "fast") {
        KMeansConfig kcfg;
        kcfg.seed = opts.seed;
        kcfg.trials = opts.trials;
        points = select_points_fast(values, set, opts.bits, kcfg, &iterations);
    } else {
        points = select_points_exhaustive(values, set, opts.bits, opts.budget);
    }

    nlohmann::json out{{"points", points.points},
                       {"bits", opts.bits},
                       {"loss", sq_loss(values, points.points)},
                       {"kmeans_iterations", iterations}};
    if (opts.normalize) {
        out["mean"] = mean;
        out["scale"] = scale;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_bench(const BenchOptions& opts) {
    const UniversalSet full = generate_universal_set(builtin_setting("setting3"));

    Rng rng(derive_seed(opts.seed, 0, 0));
    std::vector<float> raw = synthetic_channel(rng, opts.data_size);
    std::vector<float> data(raw.size());
    normalize_channel(raw, data);

    std::string csv = "method,n,b,N,wall_time_ms,combinations,loss\n";
    std::string phase_csv = "n,b,kmeans_ms,snap_ms\n";

    for (int b : opts.bits) {
        const std::size_t k = std::size_t{1} << b;
        for (std::size_t n : opts.sizes) {
            if (n > full.size())
                throw ValidationError("bench: size " + std::to_string(n) + " exceeds the " +
                                      std::to_string(full.size()) + "-point base set");
            const UniversalSet uni = evenly_spaced_subset(full, n);
            const std::string combos =
                binomial_str(static_cast<unsigned>(n), static_cast<unsigned>(k));

            if (n >= k) {
                KMeansConfig kcfg;
                kcfg.seed = opts.seed;
                QuantPointSet pts;
                std::vector<double> times;
                for (int r = 0; r < opts.warmup + opts.repeats; ++r) {
                    const double ms = time_ms([&] { pts = select_points_fast(data, uni, b, kcfg); });
                    if (r >= opts.warmup) times.push_back(ms);
                }
                csv += "fast," + std::to_string(n) + "," + std::to_string(b) + "," +
                       std::to_string(opts.data_size) + "," + format_double(median_ms(times)) +
                       "," + combos + "," + format_double(sq_loss(data, pts.points)) + "\n";

                // Phase split: the K-means phase does not depend on n, the
                // snap phase is the O(n 2^b) part.
                KMeansConfig cfg = kcfg;
                cfg.k = k;
                KMeansResult km;
                const double kmeans_ms = time_ms([&] { km = kmeans_best_of_trials(data, cfg); });
                constexpr int kSnapReps = 2000;
                std::vector<double> snapped;
                const double snap_ms = time_ms([&] {
                                           for (int r = 0; r < kSnapReps; ++r)
                                               snapped = snap_centroids(km.centroids, uni.values());
                                       }) /
                                       kSnapReps;
                phase_csv += std::to_string(n) + "," + std::to_string(b) + "," +
                             format_double(kmeans_ms) + "," + format_double(snap_ms) + "\n";
            } else {
                csv += "fast," + std::to_string(n) + "," + std::to_string(b) + "," +
                       std::to_string(opts.data_size) + ",NA," + combos + ",NA\n";
            }

            if (n >= k && !binomial_exceeds(static_cast<unsigned>(n), static_cast<unsigned>(k),
                                            opts.budget)) {
                QuantPointSet pts;
                std::vector<double> times;
                for (int r = 0; r < opts.warmup + opts.repeats; ++r) {
                    const double ms =
                        time_ms([&] { pts = select_points_exhaustive(data, uni, b, opts.budget); });
                    if (r >= opts.warmup) times.push_back(ms);
                }
                csv += "exhaustive," + std::to_string(n) + "," + std::to_string(b) + "," +
                       std::to_string(opts.data_size) + "," + format_double(median_ms(times)) +
                       "," + combos + "," + format_double(sq_loss(data, pts.points)) + "\n";
            } else {
                csv += "exhaustive," + std::to_string(n) + "," + std::to_string(b) + "," +
                       std::to_string(opts.data_size) + ",NA," + combos + ",NA\n";
            }
        }
    }

    write_text(opts.out_path, csv);
    if (!opts.phase_out_path.empty()) write_text(opts.phase_out_path, phase_csv);
    return 0;
}

int run_ablate_sets(const AblateOptions& opts) {
    const Tensor tensor =
        synthetic_tensor(opts.batch, opts.channels, opts.height, opts.width, opts.seed);

    std::string csv = "setting,bits,universal_size,mse\n";
    for (const auto& name : builtin_setting_names()) {
        const UniversalSet set = generate_universal_set(builtin_setting(name));
        for (int b : opts.bits) {
            csv += name + "," + std::to_string(b) + "," + std::to_string(set.size()) + ",";
            if ((std::size_t{1} << b) > set.size()) {
                csv += "NA\n"; // not enough candidate points for 2^b selections
                continue;
            }
            QuantMode mode; // channel-wise, normalized, fast
            KMeansConfig kcfg;
            kcfg.seed = opts.seed;
            kcfg.trials = opts.trials;
            const auto [quantized, report] =
                quantize_activation_tensor(tensor, set, b, mode, kcfg);
            csv += format_double(report.total_mse) + "\n";
        }
    }
    write_text(opts.out_path, csv);
    return 0;
}

int run_psnr(const PsnrOptions& opts) {
    const Image ref = read_image(opts.ref_path);
    const Image test = read_image(opts.test_path);
    if (opts.shave < 0 || 2 * static_cast<std::uint32_t>(opts.shave) >= ref.width ||
        2 * static_cast<std::uint32_t>(opts.shave) >= ref.height) {
        std::cerr << "error: shave " << opts.shave << " leaves no pixels in a " << ref.width
                  << "x" << ref.height << " image\n";
        return 2;
    }
    const MetricReport report = compute_metrics(ref, test, opts.shave);
    std::cout << report.to_json().dump(2) << "\n";
    return 0;
}

} // namespace dfsq::cli
