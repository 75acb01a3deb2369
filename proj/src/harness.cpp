#include "htlms/harness.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

namespace htlms {

namespace {

void validate_options(const ExperimentOptions& opt) {
    if (opt.n_runs == 0) throw std::invalid_argument("ExperimentConfig.n_runs: must be at least 1");
    if (opt.snapshot_every == 0) throw std::invalid_argument("ExperimentConfig.snapshot_every: must be positive");
    if (opt.threads < 0) throw std::invalid_argument("ExperimentConfig.threads: must be non-negative");
}

// Runs body(r) for r in [0, n_runs), serially or across OpenMP threads.
// Exceptions are rethrown on the calling thread (first by run index).
template <typename Body>
void for_each_run(const ExperimentOptions& opt, Body&& body) {
    const auto n = static_cast<std::ptrdiff_t>(opt.n_runs);
    if (opt.execution == Execution::Serial) {
        for (std::ptrdiff_t r = 0; r < n; ++r) body(static_cast<std::size_t>(r));
        return;
    }
    std::vector<std::exception_ptr> errors(opt.n_runs);
    const int threads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        try {
            body(static_cast<std::size_t>(r));
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

double hit_rate(const SupportSet& estimate, const SupportSet& truth) {
    if (truth.empty()) return 0.0;
    return static_cast<double>(estimate.overlap(truth)) / static_cast<double>(truth.size());
}

}  // namespace

IdentExperiment IdentExperiment::defaults() {
    IdentExperiment cfg;
    cfg.options.n_runs = 200;
    for (Algorithm a : kAllAlgorithms) {
        FilterConfig fc;
        fc.algorithm = a;
        cfg.algorithms.push_back(fc);
    }
    return cfg;
}

void IdentExperiment::validate() const {
    scenario.validate();
    validate_options(options);
    for (const auto& fc : algorithms) {
        if (fc.n_taps != scenario.n_taps) {
            throw std::invalid_argument("FilterConfig.n_taps: " + std::to_string(fc.n_taps) +
                                        " does not match scenario n_taps " + std::to_string(scenario.n_taps));
        }
        fc.validate();
    }
}

double LearningCurve::tail_mean_db(std::size_t tail) const {
    if (mean_esr.empty()) return std::numeric_limits<double>::quiet_NaN();
    tail = std::min(tail, mean_esr.size());
    double acc = 0.0;
    for (std::size_t i = mean_esr.size() - tail; i < mean_esr.size(); ++i) acc += mean_esr[i];
    return to_db(acc / static_cast<double>(tail));
}

std::vector<SnapshotDiagnostic> diagnose_run(std::span<const double> w_true, const std::vector<Snapshot>& snapshots,
                                             std::size_t d) {
    const SupportSet truth = support(w_true);
    const std::size_t s = truth.size();
    std::vector<SnapshotDiagnostic> out;
    out.reserve(snapshots.size());
    for (const auto& snap : snapshots) {
        SnapshotDiagnostic diag;
        diag.iteration = snap.iteration;
        diag.esr = esr(w_true, snap.estimate);
        if (diag.esr > 0.0) diag.ser = 1.0 / diag.esr;
        const auto t1 = theorem1_condition(w_true, snap.estimate);
        diag.theorem1 = t1.condition_holds;
        if (d > s && d < w_true.size()) diag.theorem2 = theorem2_condition(w_true, snap.estimate, d).condition_holds;
        diag.hit_rate = hit_rate(threshold_support(snap.estimate, s), truth);
        out.push_back(diag);
    }
    return out;
}

IdentResult run_ident_experiment(const IdentExperiment& cfg) {
    cfg.validate();
    const std::size_t n_alg = cfg.algorithms.size();
    const std::size_t len = cfg.scenario.signal_len;
    const std::size_t runs = cfg.options.n_runs;

    // esr[r][a * len + n]
    std::vector<RealVector> esr_by_run(runs);
    std::vector<std::vector<Snapshot>> run0_snapshots(n_alg);
    RealVector truth0;

    for_each_run(cfg.options, [&](std::size_t r) {
        IdentScenario sc = cfg.scenario;
        sc.seed = cfg.options.seed_for(r);
        const MeasurementStream stream = gen_ident_stream(sc);
        RealVector& esr_out = esr_by_run[r];
        esr_out.assign(n_alg * len, 0.0);
        for (std::size_t a = 0; a < n_alg; ++a) {
            double* curve = esr_out.data() + a * len;
            const auto observer = [&](std::size_t n, const FilterState& st, double) {
                curve[n] = esr(stream.truth, st.estimate);
            };
            auto records = run_stream(cfg.algorithms[a], stream, cfg.options.snapshot_every, observer);
            if (r == 0) {
                for (std::size_t n = 0; n < records.size(); ++n) {
                    if (records[n].estimate_snapshot) {
                        run0_snapshots[a].push_back({n + 1, std::move(*records[n].estimate_snapshot)});
                    }
                }
            }
        }
        if (r == 0) truth0 = stream.truth;
    });

    IdentResult result;
    for (std::size_t r = 0; r < runs; ++r) result.seeds.push_back(cfg.options.seed_for(r));
    for (std::size_t a = 0; a < n_alg; ++a) {
        LearningCurve curve;
        curve.label = std::string(algorithm_label(cfg.algorithms[a].algorithm));
        curve.n_runs = runs;
        curve.mean_esr.assign(len, 0.0);
        for (std::size_t r = 0; r < runs; ++r) {
            const double* src = esr_by_run[r].data() + a * len;
            for (std::size_t n = 0; n < len; ++n) curve.mean_esr[n] += src[n];
        }
        curve.mean_esr_db.resize(len);
        for (std::size_t n = 0; n < len; ++n) {
            curve.mean_esr[n] /= static_cast<double>(runs);
            curve.mean_esr_db[n] = to_db(curve.mean_esr[n]);
        }
        result.curves.push_back(std::move(curve));

        if (l0_norm(truth0) > 0) {
            result.diagnostics.push_back(
                {result.curves.back().label,
                 diagnose_run(truth0, run0_snapshots[a], cfg.algorithms[a].relaxed_sparsity)});
        }
    }
    return result;
}

std::string_view complex_algorithm_label(ComplexAlgorithm a) noexcept {
    return a == ComplexAlgorithm::Lms ? "LMS" : "HARD-LMS";
}

SpectrumExperiment SpectrumExperiment::defaults() { return SpectrumExperiment{}; }

void SpectrumExperiment::validate() const {
    scenario.validate();
    validate_options(options);
    if (passes == 0) throw std::invalid_argument("SpectrumExperiment.passes: must be positive");
    if (sparsity == 0 || sparsity > scenario.n_bins) {
        throw std::invalid_argument("SpectrumExperiment.sparsity: must lie in [1, n_bins]");
    }
}

SpectrumReport run_spectrum_once(const SpectrumExperiment& cfg, std::uint64_t seed) {
    SpectrumScenario sc = cfg.scenario;
    sc.seed = seed;
    const SpectrumSignal sig = gen_spectrum_signal(sc);
    const ComplexMeasurementStream stream = spectrum_stream_from(sig, sc, cfg.passes);

    // mu = 1/||x||^2; DFT rows all share the same norm.
    const auto row_norm = [&](std::size_t n) {
        double acc = 0.0;
        for (const Complex& v : stream.input(n)) acc += std::norm(v);
        return acc;
    };
    const double norm0 = row_norm(0);
    for (std::size_t n = 1; n < stream.size(); ++n) {
        if (std::abs(row_norm(n) - norm0) > 1e-9 * norm0) {
            throw std::runtime_error("spectrum stream: ||x(n)||^2 is not constant (row " + std::to_string(n) + ")");
        }
    }
    const double mu = 1.0 / norm0;
    const std::size_t warmup = cfg.unthresholded_passes * sc.n_samples;

    SpectrumReport rep;
    rep.seed = seed;
    rep.mu = mu;
    rep.true_support = support(stream.truth);
    rep.true_magnitudes.resize(sc.n_bins);
    for (std::size_t k = 0; k < sc.n_bins; ++k) rep.true_magnitudes[k] = std::abs(stream.truth[k]);

    for (ComplexAlgorithm alg : {ComplexAlgorithm::Lms, ComplexAlgorithm::HardLms}) {
        ComplexFilterState st(sc.n_bins);
        for (std::size_t n = 0; n < stream.size(); ++n) {
            if (alg == ComplexAlgorithm::Lms) {
                complex_lms_step(st, stream.input(n), stream.outputs[n], mu);
            } else {
                complex_hard_lms_step(st, stream.input(n), stream.outputs[n], mu, cfg.sparsity, warmup);
            }
        }
        RealVector mags(sc.n_bins);
        for (std::size_t k = 0; k < sc.n_bins; ++k) mags[k] = std::abs(st.estimate[k]);
        SupportSet top = threshold_support(st.estimate, cfg.sparsity);
        const double rate = hit_rate(top, rep.true_support);
        double on_support = 0.0;
        for (std::size_t k : rep.true_support.indices) on_support += mags[k];
        on_support /= static_cast<double>(std::max<std::size_t>(1, rep.true_support.size()));

        rep.labels.emplace_back(complex_algorithm_label(alg));
        rep.estimated_magnitudes.push_back(std::move(mags));
        rep.top_s.push_back(std::move(top));
        rep.hit_rate.push_back(rate);
        rep.mean_true_bin_magnitude.push_back(on_support);
        rep.esr.push_back(rep.true_support.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                   : esr(stream.truth, st.estimate));
    }
    return rep;
}

SpectrumResult run_spectrum_experiment(const SpectrumExperiment& cfg) {
    cfg.validate();
    SpectrumResult result;
    result.runs.resize(cfg.options.n_runs);
    for_each_run(cfg.options,
                 [&](std::size_t r) { result.runs[r] = run_spectrum_once(cfg, cfg.options.seed_for(r)); });

    result.labels = result.runs.front().labels;
    const std::size_t n_alg = result.labels.size();
    result.full_recovery_rate.assign(n_alg, 0.0);
    result.mean_true_bin_magnitude.assign(n_alg, 0.0);
    for (const auto& rep : result.runs) {
        for (std::size_t a = 0; a < n_alg; ++a) {
            if (rep.hit_rate[a] == 1.0) result.full_recovery_rate[a] += 1.0;
            result.mean_true_bin_magnitude[a] += rep.mean_true_bin_magnitude[a];
        }
    }
    for (std::size_t a = 0; a < n_alg; ++a) {
        result.full_recovery_rate[a] /= static_cast<double>(result.runs.size());
        result.mean_true_bin_magnitude[a] /= static_cast<double>(result.runs.size());
    }
    return result;
}

}  // namespace htlms
