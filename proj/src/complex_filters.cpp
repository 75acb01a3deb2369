#include "htlms/complex_filters.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace htlms {

namespace {

void check_dims(const ComplexFilterState& state, std::span<const Complex> x) {
    if (x.size() != state.estimate.size()) {
        throw std::invalid_argument("complex filter step: input length " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(state.estimate.size()));
    }
}

void check_mu(double mu) {
    if (!std::isfinite(mu) || mu <= 0.0) throw std::invalid_argument("complex filter step: mu must be positive");
}

}  // namespace

void ComplexMeasurementStream::push(std::span<const Complex> x, Complex y) {
    if (n_taps == 0) n_taps = x.size();
    if (x.size() != n_taps) throw std::invalid_argument("ComplexMeasurementStream: row length mismatch");
    inputs.insert(inputs.end(), x.begin(), x.end());
    outputs.push_back(y);
}

Complex conj_inner(std::span<const Complex> w, std::span<const Complex> x) {
    Complex acc{};
    for (std::size_t i = 0; i < w.size(); ++i) acc += std::conj(w[i]) * x[i];
    return acc;
}

Complex complex_lms_step(ComplexFilterState& state, std::span<const Complex> x, Complex y, double mu) {
    check_dims(state, x);
    check_mu(mu);
    const Complex e = y - conj_inner(state.estimate, x);
    const Complex ec = std::conj(e);
    for (std::size_t i = 0; i < x.size(); ++i) state.estimate[i] += mu * (ec * x[i]);
    ++state.iteration;
    return e;
}

Complex complex_hard_lms_step(ComplexFilterState& state, std::span<const Complex> x, Complex y,
                              double mu, std::size_t sparsity, std::size_t warmup_steps) {
    detail::check_sparsity(sparsity, state.estimate.size(), "complex_hard_lms_step");
    const bool threshold = state.iteration >= warmup_steps;
    const Complex e = complex_lms_step(state, x, y, mu);
    if (threshold) hard_threshold_inplace(std::span<Complex>(state.estimate), sparsity);
    return e;
}

}  // namespace htlms
