#ifndef HTLMS_HARNESS_HPP
#define HTLMS_HARNESS_HPP

// Monte-Carlo experiment drivers. Runs are independent: run r uses seed
// base_seed + r, every algorithm in a run sees the same stream, and the
// per-iteration means are reduced in run order. The parallel path (OpenMP
// over runs) and the serial reference path produce bit-identical results.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "htlms/filters.hpp"
#include "htlms/recovery.hpp"
#include "htlms/signal_lab.hpp"

namespace htlms {

enum class Execution { Serial, Parallel };

struct ExperimentOptions {
    std::size_t n_runs = 1;
    std::uint64_t base_seed = 1;
    std::size_t snapshot_every = 100;
    int threads = 0;  // 0: OpenMP default
    Execution execution = Execution::Parallel;
    std::filesystem::path output_dir = "out";

    std::uint64_t seed_for(std::size_t run) const { return base_seed + run; }
};

struct IdentExperiment {
    IdentScenario scenario;
    std::vector<FilterConfig> algorithms;
    ExperimentOptions options;

    /// N=256, 28 unit taps, 2000 samples, 30 dB, mu=0.005, rho=5e-5,
    /// eps=10, s=28, d=56, warm-up 512, 200 runs, all seven algorithms.
    static IdentExperiment defaults();
    /// Throws std::invalid_argument naming the field at fault.
    void validate() const;
};

struct LearningCurve {
    std::string label;
    RealVector mean_esr;     // index n: ESR of w(n+1), mean over runs
    RealVector mean_esr_db;  // 10 log10 of mean_esr
    std::size_t n_runs = 0;

    /// Mean of mean_esr over the last `tail` iterations, in dB.
    double tail_mean_db(std::size_t tail) const;
};

struct SnapshotDiagnostic {
    std::size_t iteration = 0;  // number of updates applied
    double esr = 0.0;
    std::optional<double> ser;  // empty when the estimate is exact
    bool theorem1 = false;
    std::optional<bool> theorem2;  // empty when s < d < N fails
    double hit_rate = 0.0;
};

struct Snapshot {
    std::size_t iteration = 0;
    RealVector estimate;
};

/// Theorem 1/2 telemetry for a sequence of estimates. d is the relaxed
/// sparsity used for the superset check.
std::vector<SnapshotDiagnostic> diagnose_run(std::span<const double> w_true, const std::vector<Snapshot>& snapshots,
                                             std::size_t d);

struct AlgorithmDiagnostics {
    std::string label;
    std::vector<SnapshotDiagnostic> snapshots;  // from run 0
};

struct IdentResult {
    std::vector<LearningCurve> curves;
    std::vector<AlgorithmDiagnostics> diagnostics;
    std::vector<std::uint64_t> seeds;
};

IdentResult run_ident_experiment(const IdentExperiment& cfg);

enum class ComplexAlgorithm { Lms, HardLms };

std::string_view complex_algorithm_label(ComplexAlgorithm a) noexcept;

struct SpectrumExperiment {
    SpectrumScenario scenario;
    std::size_t passes = 10;
    std::size_t sparsity = 20;
    /// Passes run without thresholding before HARD-LMS starts thresholding.
    std::size_t unthresholded_passes = 1;
    ExperimentOptions options;

    /// 1000 samples, 10 tones, 20 dB, 300 random samples, 10 passes, s=20.
    static SpectrumExperiment defaults();
    void validate() const;
};

struct SpectrumReport {
    std::uint64_t seed = 0;
    double mu = 0.0;
    RealVector true_magnitudes;
    SupportSet true_support;
    std::vector<std::string> labels;
    std::vector<RealVector> estimated_magnitudes;  // per algorithm
    std::vector<SupportSet> top_s;                 // support(H_s(estimate))
    std::vector<double> hit_rate;                  // |top_s ∩ true| / |true|
    std::vector<double> mean_true_bin_magnitude;
    std::vector<double> esr;
};

struct SpectrumResult {
    std::vector<SpectrumReport> runs;
    std::vector<std::string> labels;
    std::vector<double> full_recovery_rate;  // fraction of runs with hit_rate == 1
    std::vector<double> mean_true_bin_magnitude;
};

/// One scenario draw, both complex algorithms.
SpectrumReport run_spectrum_once(const SpectrumExperiment& cfg, std::uint64_t seed);
SpectrumResult run_spectrum_experiment(const SpectrumExperiment& cfg);

inline constexpr int kSummarySchemaVersion = 1;

/// curves.csv + summary.json into output_dir.
void emit_outputs(const IdentExperiment& cfg, const IdentResult& result, const std::filesystem::path& output_dir);
/// spectrum.csv (first run) + summary.json into output_dir.
void emit_outputs(const SpectrumExperiment& cfg, const SpectrumResult& result,
                  const std::filesystem::path& output_dir);

/// Parsed curves.csv: labels and ESR-dB columns.
struct CurveTable {
    std::vector<std::string> labels;
    std::vector<RealVector> columns;
    std::vector<std::size_t> iterations;
};
CurveTable read_curves_csv(const std::filesystem::path& path);

/// Applies a JSON config file on top of cfg; keys mirror the CLI flags.
void apply_config_file(IdentExperiment& cfg, const std::filesystem::path& path);
void apply_config_file(SpectrumExperiment& cfg, const std::filesystem::path& path);

}  // namespace htlms

#endif  // HTLMS_HARNESS_HPP
