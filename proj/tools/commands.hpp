// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dfsq::cli {

struct GensetOptions {
    std::string setting = "setting3";
    std::string config_path;   // overrides setting when non-empty
    std::string out_path;      // JSON array of values
    std::string csv_path;      // one value per line
    bool negatives = true;
};
int run_genset(const GensetOptions& opts);

struct QuantizeOptions {
    std::string in_path;
    std::string out_path;
    std::string set_path;      // JSON array; overrides setting when non-empty
    std::string setting = "setting3";
    std::string mode = "fast"; // fast | exhaustive | static
    std::string calib_path;    // required for static
    std::string report_path;   // stdout when empty
    int bits = 4;
    std::uint64_t seed = 0;
    std::size_t trials = 3;
    std::size_t max_iters = 50;
    double tol = 1e-6;
    bool layer_wise = false;
    bool no_norm = false;
    std::uint64_t budget = 10'000'000;
    unsigned threads = 1;
};
int run_quantize(const QuantizeOptions& opts);

struct SelectOptions {
    std::string in_path;
    std::string set_path;
    std::string setting = "setting3";
    std::string mode = "fast";
    int bits = 4;
    std::uint64_t seed = 0;
    std::size_t trials = 3;
    std::uint64_t budget = 10'000'000;
    bool normalize = false;
};
int run_select(const SelectOptions& opts);

struct BenchOptions {
    std::string out_path;        // CSV; stdout when empty
    std::string phase_out_path;  // optional per-phase timing CSV
    std::vector<std::size_t> sizes = {8, 12, 16, 20, 107};
    std::vector<int> bits = {2, 3};
    std::size_t data_size = 4096;
    std::uint64_t seed = 0;
    std::uint64_t budget = 10'000'000;
    int repeats = 5;
    int warmup = 1;
};
int run_bench(const BenchOptions& opts);

struct AblateOptions {
    std::string out_path; // CSV; stdout when empty
    std::vector<int> bits = {3, 4, 6, 8};
    std::uint64_t batch = 2, channels = 8, height = 16, width = 16;
    std::uint64_t seed = 0;
    std::size_t trials = 3;
};
int run_ablate_sets(const AblateOptions& opts);

struct PsnrOptions {
    std::string ref_path;
    std::string test_path;
    int shave = 0;
};
int run_psnr(const PsnrOptions& opts);

} // namespace dfsq::cli
