// SPDX-License-Identifier: Apache-2.0
//
// dfsq: subset-quantization toolkit. Subcommands: genset, quantize, select,
// bench, ablate-sets, psnr. Exit codes: 0 success, 1 runtime error, 2 usage.
#include "commands.hpp"

#include "dfsq/errors.hpp"
#include "dfsq/universal_set.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace dfsq::cli;

    CLI::App app{"Distribution-flexible subset quantization toolkit"};
    app.require_subcommand(1);

    GensetOptions genset;
    auto* cmd_genset = app.add_subcommand(
        "genset", "Generate a universal set from word sets and verify it is hardware-friendly");
    cmd_genset->add_option("--setting", genset.setting, "Built-in word-set configuration")
        ->check(CLI::IsMember(dfsq::builtin_setting_names()));
    cmd_genset->add_option("--config", genset.config_path,
                           "Word-set config JSON ({\"word_sets\": [[...]], "
                           "\"include_negatives\": true}); overrides --setting");
    cmd_genset->add_option("--out", genset.out_path, "Write the set as a JSON array of values");
    cmd_genset->add_option("--csv", genset.csv_path, "Write the set as CSV, one value per line");
    cmd_genset->add_flag("--negatives,!--no-negatives", genset.negatives,
                         "Mirror the set about zero (default on)");

    QuantizeOptions quantize;
    auto* cmd_quantize =
        app.add_subcommand("quantize", "Fake-quantize an activation tensor and emit a report");
    cmd_quantize->add_option("--in", quantize.in_path, "Input tensor (.tnsr)")->required();
    cmd_quantize->add_option("--out", quantize.out_path, "Output tensor (.tnsr)")->required();
    cmd_quantize->add_option("--bits", quantize.bits, "Bit-width b; 2^b points per unit")
        ->check(CLI::Range(1, 16));
    cmd_quantize->add_option("--set", quantize.set_path,
                             "Universal set as a JSON array of values; overrides --setting");
    cmd_quantize->add_option("--setting", quantize.setting, "Built-in universal set")
        ->check(CLI::IsMember(dfsq::builtin_setting_names()));
    cmd_quantize->add_option("--mode", quantize.mode, "Point selection strategy")
        ->check(CLI::IsMember({"fast", "exhaustive", "static"}));
    cmd_quantize->add_option("--calib", quantize.calib_path,
                             "Calibration tensor (required for --mode static)");
    cmd_quantize->add_option("--report", quantize.report_path,
                             "Report JSON path (stdout when omitted)");
    cmd_quantize->add_option("--seed", quantize.seed, "Base seed for K-means trials");
    cmd_quantize->add_option("--trials", quantize.trials, "K-means restarts per unit");
    cmd_quantize->add_option("--max-iters", quantize.max_iters, "K-means iteration cap");
    cmd_quantize->add_option("--tol", quantize.tol, "K-means relative SSE stop threshold");
    cmd_quantize->add_flag("--layer-wise", quantize.layer_wise,
                           "Pool statistics and points over each sample instead of per channel");
    cmd_quantize->add_flag("--no-norm", quantize.no_norm,
                           "Skip channel normalization (quantize raw values)");
    cmd_quantize->add_option("--budget", quantize.budget,
                             "Max subset combinations for exhaustive mode");
    cmd_quantize->add_option("--threads", quantize.threads,
                             "Worker threads (0 = hardware concurrency)");

    SelectOptions select;
    auto* cmd_select = app.add_subcommand(
        "select", "Run quantization-point selection on the pooled values of a tensor");
    cmd_select->add_option("--in", select.in_path, "Input tensor (.tnsr)")->required();
    cmd_select->add_option("--bits", select.bits, "Bit-width b")->check(CLI::Range(1, 16));
    cmd_select->add_option("--set", select.set_path, "Universal set JSON; overrides --setting");
    cmd_select->add_option("--setting", select.setting, "Built-in universal set")
        ->check(CLI::IsMember(dfsq::builtin_setting_names()));
    cmd_select->add_option("--mode", select.mode, "fast or exhaustive")
        ->check(CLI::IsMember({"fast", "exhaustive"}));
    cmd_select->add_option("--seed", select.seed, "Base seed");
    cmd_select->add_option("--trials", select.trials, "K-means restarts");
    cmd_select->add_option("--budget", select.budget, "Exhaustive combination budget");
    cmd_select->add_flag("--normalize", select.normalize,
                         "Normalize the pooled values before selecting");

    BenchOptions bench;
    auto* cmd_bench = app.add_subcommand(
        "bench", "Sweep universal-set sizes; time fast vs exhaustive selection, emit CSV");
    cmd_bench->add_option("--out", bench.out_path, "CSV path (stdout when omitted)");
    cmd_bench->add_option("--phase-out", bench.phase_out_path,
                          "Also write per-phase (K-means vs snap) timings CSV");
    cmd_bench->add_option("--sizes", bench.sizes, "Universal-set sizes to sweep");
    cmd_bench->add_option("--bits", bench.bits, "Bit-widths to sweep");
    cmd_bench->add_option("--data-size", bench.data_size, "Samples per synthetic channel");
    cmd_bench->add_option("--seed", bench.seed, "Data and K-means seed");
    cmd_bench->add_option("--budget", bench.budget, "Exhaustive combination budget");
    cmd_bench->add_option("--repeats", bench.repeats, "Timed repetitions (median reported)")
        ->check(CLI::PositiveNumber);
    cmd_bench->add_option("--warmup", bench.warmup, "Warmup runs before timing")
        ->check(CLI::NonNegativeNumber);

    AblateOptions ablate;
    auto* cmd_ablate = app.add_subcommand(
        "ablate-sets", "Quantization MSE of each built-in setting on one synthetic tensor");
    cmd_ablate->add_option("--out", ablate.out_path, "CSV path (stdout when omitted)");
    cmd_ablate->add_option("--bits", ablate.bits, "Bit-widths to evaluate");
    cmd_ablate->add_option("--batch", ablate.batch, "Synthetic tensor batch size");
    cmd_ablate->add_option("--channels", ablate.channels, "Synthetic tensor channels");
    cmd_ablate->add_option("--height", ablate.height, "Synthetic tensor height");
    cmd_ablate->add_option("--width", ablate.width, "Synthetic tensor width");
    cmd_ablate->add_option("--seed", ablate.seed, "Synthetic data seed");
    cmd_ablate->add_option("--trials", ablate.trials, "K-means restarts");

    PsnrOptions psnr;
    auto* cmd_psnr =
        app.add_subcommand("psnr", "PSNR/SSIM/MSE over the Y channel of two PPM/PGM images");
    cmd_psnr->add_option("--ref", psnr.ref_path, "Reference image")->required();
    cmd_psnr->add_option("--test", psnr.test_path, "Test image")->required();
    cmd_psnr->add_option("--shave", psnr.shave, "Border pixels to exclude on all sides");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the message and usage hint
        return 2;
    }

    try {
        if (cmd_genset->parsed()) return run_genset(genset);
        if (cmd_quantize->parsed()) return run_quantize(quantize);
        if (cmd_select->parsed()) return run_select(select);
        if (cmd_bench->parsed()) return run_bench(bench);
        if (cmd_ablate->parsed()) return run_ablate_sets(ablate);
        if (cmd_psnr->parsed()) return run_psnr(psnr);
    } catch (const dfsq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
