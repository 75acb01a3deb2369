#include "htlms/filters.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace htlms {

namespace {

constexpr std::string_view kLabels[] = {
    "LMS", "ZA-LMS", "RZA-LMS", "SZA-LMS", "HARD-LMS", "HARD-INIT-LMS", "HARD-REL-LMS",
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw std::invalid_argument("FilterConfig." + field + ": " + what);
}

bool uses_sparsity(Algorithm a) {
    return a == Algorithm::SzaLms || a == Algorithm::HardLms || a == Algorithm::HardInitLms ||
           a == Algorithm::HardRelLms;
}

void check_dims(const FilterState& state, std::span<const double> x, const FilterConfig& cfg) {
    if (x.size() != cfg.n_taps || state.estimate.size() != cfg.n_taps) {
        throw std::invalid_argument("filter step: input length " + std::to_string(x.size()) +
                                    ", estimate length " + std::to_string(state.estimate.size()) +
                                    ", expected " + std::to_string(cfg.n_taps));
    }
}

// e(n) = y - w(n)^T x(n); accumulation order is fixed (index order from
// 0.0) so batch IHT with a single row reproduces it bit for bit.
double prediction_error(std::span<const double> w, std::span<const double> x, double y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
    return y - acc;
}

// w += mu * (e * x)
void gradient_step(std::span<double> w, std::span<const double> x, double e, double mu) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += mu * (e * x[i]);
}

}  // namespace

std::string_view algorithm_label(Algorithm a) noexcept {
    return kLabels[static_cast<std::size_t>(a)];
}

std::optional<Algorithm> parse_algorithm(std::string_view label) {
    std::string norm;
    for (char c : label) {
        norm.push_back(c == '_' ? '-' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    for (Algorithm a : kAllAlgorithms) {
        if (algorithm_label(a) == norm) return a;
    }
    return std::nullopt;
}

void FilterConfig::validate() const {
    require(n_taps >= 1, "n_taps", "must be positive");
    require(std::isfinite(mu) && mu > 0.0, "mu", "must be a positive finite step size");
    require(std::isfinite(rho) && rho >= 0.0, "rho", "must be non-negative");
    if (algorithm == Algorithm::RzaLms) {
        require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon", "must be positive");
    }
    if (uses_sparsity(algorithm)) {
        require(sparsity >= 1 && sparsity <= n_taps, "sparsity",
                "must lie in [1, n_taps=" + std::to_string(n_taps) + "]");
    }
    if (algorithm == Algorithm::HardRelLms) {
        require(relaxed_sparsity >= sparsity && relaxed_sparsity <= n_taps, "relaxed_sparsity",
                "must lie in [sparsity, n_taps]");
    }
}

void MeasurementStream::push(std::span<const double> x, double y) {
    if (n_taps == 0) n_taps = x.size();
    if (x.size() != n_taps) throw std::invalid_argument("MeasurementStream: row length mismatch");
    inputs.insert(inputs.end(), x.begin(), x.end());
    outputs.push_back(y);
}

StepRecord lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg) {
    check_dims(state, x, cfg);
    const double e = prediction_error(state.estimate, x, y);
    gradient_step(state.estimate, x, e, cfg.mu);
    ++state.iteration;
    return {e, std::nullopt};
}

StepRecord za_lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg) {
    check_dims(state, x, cfg);
    auto& w = state.estimate;
    const double e = prediction_error(w, x, y);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double attract = cfg.rho * sgn(w[i]);
        w[i] = (w[i] + cfg.mu * (e * x[i])) - attract;
    }
    ++state.iteration;
    return {e, std::nullopt};
}

StepRecord rza_lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg) {
    check_dims(state, x, cfg);
    auto& w = state.estimate;
    const double e = prediction_error(w, x, y);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double attract = cfg.rho * sgn(w[i]) / (1.0 + cfg.epsilon * std::abs(w[i]));
        w[i] = (w[i] + cfg.mu * (e * x[i])) - attract;
    }
    ++state.iteration;
    return {e, std::nullopt};
}

StepRecord sza_lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg) {
    check_dims(state, x, cfg);
    auto& w = state.estimate;
    const double e = prediction_error(w, x, y);
    // P_s is taken on w(n), before the gradient step.
    const RealVector penalty = penalty_mask(std::span<const double>(w), cfg.sparsity);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = (w[i] + cfg.mu * (e * x[i])) - cfg.rho * penalty[i];
    }
    ++state.iteration;
    return {e, std::nullopt};
}

StepRecord hard_lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg) {
    check_dims(state, x, cfg);
    const double e = prediction_error(state.estimate, x, y);
    gradient_step(state.estimate, x, e, cfg.mu);
    switch (cfg.algorithm) {
        case Algorithm::HardInitLms:
            if (state.iteration >= cfg.warmup_steps) {
                hard_threshold_inplace(std::span<double>(state.estimate), cfg.sparsity);
            }
            break;
        case Algorithm::HardRelLms:
            hard_threshold_inplace(std::span<double>(state.estimate), cfg.relaxed_sparsity);
            break;
        default:
            hard_threshold_inplace(std::span<double>(state.estimate), cfg.sparsity);
            break;
    }
    ++state.iteration;
    return {e, std::nullopt};
}

StepRecord filter_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::Lms: return lms_step(state, x, y, cfg);
        case Algorithm::ZaLms: return za_lms_step(state, x, y, cfg);
        case Algorithm::RzaLms: return rza_lms_step(state, x, y, cfg);
        case Algorithm::SzaLms: return sza_lms_step(state, x, y, cfg);
        case Algorithm::HardLms:
        case Algorithm::HardInitLms:
        case Algorithm::HardRelLms: return hard_lms_step(state, x, y, cfg);
    }
    throw std::logic_error("filter_step: unknown algorithm");
}

std::vector<StepRecord> run_stream(const FilterConfig& cfg, const MeasurementStream& stream,
                                   std::size_t snapshot_every, const StepObserver& observer) {
    FilterState state(cfg.n_taps);
    return run_stream_from(state, cfg, stream, snapshot_every, observer);
}

std::vector<StepRecord> run_stream_from(FilterState& state, const FilterConfig& cfg,
                                        const MeasurementStream& stream,
                                        std::size_t snapshot_every, const StepObserver& observer) {
    cfg.validate();
    if (snapshot_every == 0) throw std::invalid_argument("run_stream: snapshot_every must be positive");
    std::vector<StepRecord> records;
    if (stream.empty()) return records;
    if (stream.n_taps != cfg.n_taps) {
        throw std::invalid_argument("run_stream: stream rows have length " +
                                    std::to_string(stream.n_taps) + ", filter expects " +
                                    std::to_string(cfg.n_taps));
    }
    records.reserve(stream.size());
    for (std::size_t n = 0; n < stream.size(); ++n) {
        StepRecord rec = filter_step(state, stream.input(n), stream.outputs[n], cfg);
        if ((n + 1) % snapshot_every == 0) rec.estimate_snapshot = state.estimate;
        if (observer) observer(n, state, rec.error);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace htlms
