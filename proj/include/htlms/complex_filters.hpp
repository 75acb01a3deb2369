#ifndef HTLMS_COMPLEX_FILTERS_HPP
#define HTLMS_COMPLEX_FILTERS_HPP

// Complex LMS under the model y = w^H x + v:
//   e(n)   = y(n) - w^H(n) x(n)
//   w(n+1) = w(n) + mu * conj(e(n)) * x(n)
// and its hard-thresholded counterpart, ranked by magnitude.

#include <cstddef>
#include <span>
#include <vector>

#include "htlms/threshold.hpp"

namespace htlms {

struct ComplexFilterState {
    ComplexVector estimate;
    std::size_t iteration = 0;

    ComplexFilterState() = default;
    explicit ComplexFilterState(std::size_t n_taps) : estimate(n_taps) {}
};

struct ComplexMeasurementStream {
    std::size_t n_taps = 0;
    ComplexVector inputs;  // row-major, size() * n_taps
    ComplexVector outputs;
    ComplexVector truth;

    std::size_t size() const noexcept { return outputs.size(); }
    bool empty() const noexcept { return outputs.empty(); }
    std::span<const Complex> input(std::size_t n) const {
        return std::span<const Complex>(inputs).subspan(n * n_taps, n_taps);
    }
    void push(std::span<const Complex> x, Complex y);
};

/// w^H x, accumulated in index order from zero.
Complex conj_inner(std::span<const Complex> w, std::span<const Complex> x);

/// Returns e(n).
Complex complex_lms_step(ComplexFilterState& state, std::span<const Complex> x, Complex y, double mu);

/// complex_lms_step followed by H_s on magnitudes. Thresholding is skipped
/// while state.iteration < warmup_steps.
Complex complex_hard_lms_step(ComplexFilterState& state, std::span<const Complex> x, Complex y,
                              double mu, std::size_t sparsity, std::size_t warmup_steps = 0);

}  // namespace htlms

#endif  // HTLMS_COMPLEX_FILTERS_HPP
