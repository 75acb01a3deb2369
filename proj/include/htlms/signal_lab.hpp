#ifndef HTLMS_SIGNAL_LAB_HPP
#define HTLMS_SIGNAL_LAB_HPP

// Seeded scenario generators: sparse FIR identification driven by white
// Gaussian input, and an undersampled multi-tone signal observed through
// rows of a unitary inverse DFT.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "htlms/complex_filters.hpp"
#include "htlms/filters.hpp"

namespace htlms {

struct IdentScenario {
    std::size_t n_taps = 256;
    std::size_t n_nonzero = 28;
    double tap_value = 1.0;
    bool random_signs = false;  // ±tap_value instead of +tap_value
    std::size_t signal_len = 2000;
    double snr_db = 30.0;  // +inf disables noise
    std::uint64_t seed = 0;

    void validate() const;
};

struct SpectrumScenario {
    std::size_t n_bins = 1000;  // full signal length == DFT size
    std::size_t n_tones = 10;
    std::size_t n_samples = 300;
    double snr_db = 20.0;
    bool shuffle_each_pass = false;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Identification stream: x(n) = [x(n), ..., x(n-N+1)] with zeros before
/// t = 0, y(n) = w^T x(n) + v(n). truth holds w.
MeasurementStream gen_ident_stream(const IdentScenario& sc);

/// Clean and noisy signals plus the sampling plan behind a spectrum stream.
struct SpectrumSignal {
    std::vector<std::size_t> tone_bins;     // sorted, each in [1, N/2)
    RealVector clean;                       // length n_bins
    RealVector noisy;
    std::vector<std::size_t> sample_times;  // sorted, distinct
    ComplexVector spectrum;                 // unitary DFT of clean
    double noise_variance = 0.0;
};

SpectrumSignal gen_spectrum_signal(const SpectrumScenario& sc);

/// Emits `passes` repetitions of the selected samples. Row n is the
/// conjugated row of U Phi (Phi the unitary inverse DFT), so that
/// w^H x(n) reproduces the time sample for the real signal.
ComplexMeasurementStream gen_spectrum_stream(const SpectrumScenario& sc, std::size_t passes);
ComplexMeasurementStream spectrum_stream_from(const SpectrumSignal& sig, const SpectrumScenario& sc,
                                              std::size_t passes);

/// Unitary DFT: X_k = N^{-1/2} sum_t x_t e^{-2 pi i k t / N}. Direct O(N^2).
ComplexVector unitary_dft(std::span<const double> x);
/// Row t of Phi: N^{-1/2} e^{+2 pi i k t / N}, k = 0..N-1.
ComplexVector inverse_dft_row(std::size_t n_bins, std::size_t t);

/// ||w_true - w_hat||^2 / ||w_true||^2.
double esr(std::span<const double> w_true, std::span<const double> w_hat);
double esr(std::span<const Complex> w_true, std::span<const Complex> w_hat);
/// 10 log10(ratio); -inf for 0.
double to_db(double ratio);

/// Writes "index,x_hash,y" (or "index,x0..x{N-1},y" with full_rows). The hash
/// is FNV-1a 64 over the row's IEEE-754 bytes, printed as 16 hex digits.
void write_stream_csv(const MeasurementStream& stream, const std::filesystem::path& path, bool full_rows);
/// Complex rows: "index,x_hash,y_re,y_im" or full rows as x{k}_re,x{k}_im pairs.
void write_stream_csv(const ComplexMeasurementStream& stream, const std::filesystem::path& path,
                      bool full_rows);

std::uint64_t row_hash(std::span<const double> row);
std::uint64_t row_hash(std::span<const Complex> row);

}  // namespace htlms

#endif  // HTLMS_SIGNAL_LAB_HPP
