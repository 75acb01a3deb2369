#ifndef HTLMS_FILTERS_HPP
#define HTLMS_FILTERS_HPP

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "htlms/threshold.hpp"

namespace htlms {

enum class Algorithm {
    Lms,
    ZaLms,
    RzaLms,
    SzaLms,
    HardLms,
    HardInitLms,
    HardRelLms,
};

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::Lms,    Algorithm::ZaLms,       Algorithm::RzaLms,    Algorithm::SzaLms,
    Algorithm::HardLms, Algorithm::HardInitLms, Algorithm::HardRelLms,
};

/// Display label, e.g. "HARD-INIT-LMS".
std::string_view algorithm_label(Algorithm a) noexcept;
/// Inverse of algorithm_label; case-insensitive, '_' accepted for '-'.
std::optional<Algorithm> parse_algorithm(std::string_view label);

struct FilterConfig {
    Algorithm algorithm = Algorithm::Lms;
    std::size_t n_taps = 256;
    double mu = 0.005;
    double rho = 5e-5;
    double epsilon = 10.0;
    std::size_t sparsity = 28;
    std::size_t relaxed_sparsity = 56;
    std::size_t warmup_steps = 512;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct FilterState {
    RealVector estimate;
    std::size_t iteration = 0;

    FilterState() = default;
    explicit FilterState(std::size_t n_taps) : estimate(n_taps, 0.0) {}
};

struct StepRecord {
    double error = 0.0;
    std::optional<RealVector> estimate_snapshot;
};

/// Ordered (input window, observation) pairs. Rows are stored contiguously.
struct MeasurementStream {
    std::size_t n_taps = 0;
    RealVector inputs;  // size() * n_taps, row-major
    RealVector outputs;
    RealVector truth;   // ground-truth w, empty when unknown

    std::size_t size() const noexcept { return outputs.size(); }
    bool empty() const noexcept { return outputs.empty(); }
    std::span<const double> input(std::size_t n) const {
        return std::span<const double>(inputs).subspan(n * n_taps, n_taps);
    }
    void push(std::span<const double> x, double y);
};

// Single-step updates. Each mutates state in place (w(n) -> w(n+1),
// n -> n+1) and returns e(n) computed on the pre-update estimate.
StepRecord lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg);
StepRecord za_lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg);
StepRecord rza_lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg);
StepRecord sza_lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg);
/// HARD-LMS, HARD-INIT-LMS and HARD-REL-LMS, selected by cfg.algorithm.
StepRecord hard_lms_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg);

/// Dispatches on cfg.algorithm.
StepRecord filter_step(FilterState& state, std::span<const double> x, double y, const FilterConfig& cfg);

/// Called after every update with the step index n (0-based), the updated
/// state and the step's error.
using StepObserver = std::function<void(std::size_t, const FilterState&, double)>;

/// Runs cfg over the stream from w(0) = 0. snapshot_every = k stores w(n+1)
/// on every k-th step (n+1 divisible by k). observer may be empty.
std::vector<StepRecord> run_stream(const FilterConfig& cfg, const MeasurementStream& stream,
                                   std::size_t snapshot_every,
                                   const StepObserver& observer = {});

/// Same as run_stream, but starts from the given state.
std::vector<StepRecord> run_stream_from(FilterState& state, const FilterConfig& cfg,
                                        const MeasurementStream& stream,
                                        std::size_t snapshot_every,
                                        const StepObserver& observer = {});

}  // namespace htlms

#endif  // HTLMS_FILTERS_HPP
