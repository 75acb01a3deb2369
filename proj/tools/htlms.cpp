// htlms: command-line driver for the identification and spectrum experiments.
//
//   htlms ident    [flags]   sparse FIR identification learning curves
//   htlms spectrum [flags]   undersampled multi-tone spectrum estimation
//
// Flags default to the reference setups. --config <file.json> is applied
// after the flags and wins over them.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "htlms/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct CommonFlags {
    std::size_t runs = 0;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::string config;
    std::string dump_stream;
    bool full_rows = false;
    int threads = 0;
    bool serial = false;
    std::size_t snapshot_every = 100;
};

void add_common(CLI::App* app, CommonFlags& f, std::size_t default_runs) {
    f.runs = default_runs;
    app->add_option("--runs", f.runs, "Independent runs (seed = base seed + run index)")->capture_default_str();
    app->add_option("--seed", f.seed, "Base seed")->capture_default_str();
    app->add_option("--out", f.out, "Output directory")->capture_default_str();
    app->add_option("--config", f.config, "JSON config file; its keys override flags")->check(CLI::ExistingFile);
    app->add_option("--threads", f.threads, "OpenMP threads across runs (0 = default)")->capture_default_str();
    app->add_flag("--serial", f.serial, "Use the serial reference path");
    app->add_option("--snapshot-every", f.snapshot_every, "Estimate snapshot cadence for diagnostics")
        ->capture_default_str();
    app->add_option("--dump-stream", f.dump_stream, "Write the run-0 measurement stream to this CSV");
    app->add_flag("--full-rows", f.full_rows, "With --dump-stream: write full input rows instead of hashes");
}

void apply_common(htlms::ExperimentOptions& opt, const CommonFlags& f) {
    opt.n_runs = f.runs;
    opt.base_seed = f.seed;
    opt.output_dir = f.out;
    opt.threads = f.threads;
    opt.execution = f.serial ? htlms::Execution::Serial : htlms::Execution::Parallel;
    opt.snapshot_every = f.snapshot_every;
}

double parse_snr(const std::string& text) {
    if (text == "inf" || text == "off" || text == "none") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("--snr: not a number: " + text);
    return v;
}

void print_ident(const htlms::IdentResult& result) {
    std::printf("%-14s %14s %14s\n", "algorithm", "final ESR dB", "tail500 dB");
    for (const auto& c : result.curves) {
        std::printf("%-14s %14.3f %14.3f\n", c.label.c_str(), c.mean_esr_db.back(), c.tail_mean_db(500));
    }
}

void print_spectrum(const htlms::SpectrumResult& result) {
    std::printf("%-10s %16s %20s\n", "algorithm", "full recovery", "mean |w| on support");
    for (std::size_t a = 0; a < result.labels.size(); ++a) {
        std::printf("%-10s %16.3f %20.4f\n", result.labels[a].c_str(), result.full_recovery_rate[a],
                    result.mean_true_bin_magnitude[a]);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hard threshold LMS experiments"};
    app.require_subcommand(1);

    // ident
    auto* ident = app.add_subcommand("ident", "Sparse system identification learning curves");
    CommonFlags ident_common;
    auto ident_cfg = htlms::IdentExperiment::defaults();
    htlms::FilterConfig proto;
    std::string ident_snr = "30";
    std::vector<std::string> labels;
    for (auto a : htlms::kAllAlgorithms) labels.emplace_back(htlms::algorithm_label(a));
    add_common(ident, ident_common, ident_cfg.options.n_runs);
    ident->add_option("--taps", ident_cfg.scenario.n_taps, "Filter length N")->capture_default_str();
    ident->add_option("--nonzero", ident_cfg.scenario.n_nonzero, "Nonzero taps in the true filter")
        ->capture_default_str();
    ident->add_option("--tap-value", ident_cfg.scenario.tap_value, "Value of the nonzero taps")->capture_default_str();
    ident->add_flag("--random-signs", ident_cfg.scenario.random_signs, "Nonzero taps are ±tap-value");
    ident->add_option("--len", ident_cfg.scenario.signal_len, "Input signal length")->capture_default_str();
    ident->add_option("--snr", ident_snr, "Output SNR in dB, or 'inf'")->capture_default_str();
    ident->add_option("--mu", proto.mu, "Step size")->capture_default_str();
    ident->add_option("--rho", proto.rho, "Zero-attractor strength")->capture_default_str();
    ident->add_option("--epsilon", proto.epsilon, "RZA-LMS reweighting constant")->capture_default_str();
    ident->add_option("--sparsity", proto.sparsity, "Assumed sparsity s")->capture_default_str();
    ident->add_option("--relaxed", proto.relaxed_sparsity, "Relaxed sparsity d for HARD-REL-LMS")
        ->capture_default_str();
    ident->add_option("--warmup", proto.warmup_steps, "Unthresholded updates for HARD-INIT-LMS")
        ->capture_default_str();
    ident->add_option("--algorithms", labels, "Algorithms to compare")->delimiter(',')->capture_default_str();

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "Undersampled spectrum estimation");
    CommonFlags spec_common;
    auto spec_cfg = htlms::SpectrumExperiment::defaults();
    std::string spec_snr = "20";
    add_common(spectrum, spec_common, spec_cfg.options.n_runs);
    spectrum->add_option("--bins", spec_cfg.scenario.n_bins, "Signal length / DFT size")->capture_default_str();
    spectrum->add_option("--tones", spec_cfg.scenario.n_tones, "Number of sine waves")->capture_default_str();
    spectrum->add_option("--samples", spec_cfg.scenario.n_samples, "Random samples kept")->capture_default_str();
    spectrum->add_option("--snr", spec_snr, "Signal SNR in dB, or 'inf'")->capture_default_str();
    spectrum->add_option("--passes", spec_cfg.passes, "Passes over the samples")->capture_default_str();
    spectrum->add_option("--sparsity", spec_cfg.sparsity, "Thresholding sparsity s")->capture_default_str();
    spectrum->add_option("--unthresholded-passes", spec_cfg.unthresholded_passes,
                         "Leading passes where HARD-LMS does not threshold")
        ->capture_default_str();
    spectrum->add_flag("--shuffle-passes", spec_cfg.scenario.shuffle_each_pass, "Reshuffle sample order each pass");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (ident->parsed()) {
            ident_cfg.scenario.snr_db = parse_snr(ident_snr);
            apply_common(ident_cfg.options, ident_common);
            ident_cfg.algorithms.clear();
            proto.n_taps = ident_cfg.scenario.n_taps;
            for (const auto& l : labels) {
                const auto a = htlms::parse_algorithm(l);
                if (!a) throw std::invalid_argument("--algorithms: unknown algorithm '" + l + "'");
                auto fc = proto;
                fc.algorithm = *a;
                ident_cfg.algorithms.push_back(fc);
            }
            if (!ident_common.config.empty()) htlms::apply_config_file(ident_cfg, ident_common.config);
            ident_cfg.validate();

            if (!ident_common.dump_stream.empty()) {
                auto sc = ident_cfg.scenario;
                sc.seed = ident_cfg.options.seed_for(0);
                htlms::write_stream_csv(htlms::gen_ident_stream(sc), ident_common.dump_stream, ident_common.full_rows);
            }
            const auto result = htlms::run_ident_experiment(ident_cfg);
            htlms::emit_outputs(ident_cfg, result, ident_cfg.options.output_dir);
            print_ident(result);
        } else {
            spec_cfg.scenario.snr_db = parse_snr(spec_snr);
            apply_common(spec_cfg.options, spec_common);
            if (!spec_common.config.empty()) htlms::apply_config_file(spec_cfg, spec_common.config);
            spec_cfg.validate();

            if (!spec_common.dump_stream.empty()) {
                auto sc = spec_cfg.scenario;
                sc.seed = spec_cfg.options.seed_for(0);
                htlms::write_stream_csv(htlms::gen_spectrum_stream(sc, spec_cfg.passes), spec_common.dump_stream,
                                        spec_common.full_rows);
            }
            const auto result = htlms::run_spectrum_experiment(spec_cfg);
            htlms::emit_outputs(spec_cfg, result, spec_cfg.options.output_dir);
            print_spectrum(result);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "htlms: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "htlms: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
