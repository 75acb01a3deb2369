#include "htlms/signal_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace htlms {

namespace {

using Rng = std::mt19937_64;

double noise_variance_for(double signal_power, double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

std::vector<std::size_t> draw_without_replacement(std::size_t population, std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Bins k with 0 < k < N/2: a real tone there occupies exactly k and N-k.
std::size_t tone_bin_count(std::size_t n_bins) { return n_bins < 3 ? 0 : (n_bins - 1) / 2; }

// e^{i 2 pi m / N} with the phase index reduced mod N.
Complex twiddle(std::size_t m, std::size_t n) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m % n) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_hash(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t fnv1a(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void IdentScenario::validate() const {
    if (n_taps == 0) throw std::invalid_argument("IdentScenario.n_taps: must be positive");
    if (n_nonzero > n_taps) throw std::invalid_argument("IdentScenario.n_nonzero: exceeds n_taps");
    if (signal_len == 0) throw std::invalid_argument("IdentScenario.signal_len: must be at least 1");
    if (std::isnan(snr_db)) throw std::invalid_argument("IdentScenario.snr_db: NaN");
}

void SpectrumScenario::validate() const {
    if (n_bins == 0) throw std::invalid_argument("SpectrumScenario.n_bins: must be positive");
    if (n_samples == 0 || n_samples > n_bins) {
        throw std::invalid_argument("SpectrumScenario.n_samples: must lie in [1, n_bins]");
    }
    if (n_tones > tone_bin_count(n_bins)) {
        throw std::invalid_argument("SpectrumScenario.n_tones: only " + std::to_string(tone_bin_count(n_bins)) +
                                    " bins avoid DC and Nyquist");
    }
    if (std::isnan(snr_db)) throw std::invalid_argument("SpectrumScenario.snr_db: NaN");
}

MeasurementStream gen_ident_stream(const IdentScenario& sc) {
    sc.validate();
    Rng rng(sc.seed);
    const std::size_t n = sc.n_taps;

    MeasurementStream stream;
    stream.n_taps = n;
    stream.truth.assign(n, 0.0);
    const auto taps = draw_without_replacement(n, sc.n_nonzero, rng);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i : taps) {
        stream.truth[i] = (sc.random_signs && coin(rng)) ? -sc.tap_value : sc.tap_value;
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    RealVector input(sc.signal_len);
    for (auto& v : input) v = gauss(rng);

    stream.inputs.assign(sc.signal_len * n, 0.0);
    RealVector clean(sc.signal_len);
    for (std::size_t t = 0; t < sc.signal_len; ++t) {
        double* row = stream.inputs.data() + t * n;
        const std::size_t avail = std::min(n, t + 1);
        for (std::size_t k = 0; k < avail; ++k) row[k] = input[t - k];
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += stream.truth[k] * row[k];
        clean[t] = acc;
    }

    double power = 0.0;
    for (double c : clean) power += c * c;
    power /= static_cast<double>(sc.signal_len);
    const double sigma = std::sqrt(noise_variance_for(power, sc.snr_db));

    stream.outputs.resize(sc.signal_len);
    for (std::size_t t = 0; t < sc.signal_len; ++t) {
        stream.outputs[t] = clean[t] + (sigma > 0.0 ? sigma * gauss(rng) : 0.0);
    }
    return stream;
}

SpectrumSignal gen_spectrum_signal(const SpectrumScenario& sc) {
    sc.validate();
    Rng rng(sc.seed);
    const std::size_t n = sc.n_bins;
    SpectrumSignal sig;

    auto picks = draw_without_replacement(tone_bin_count(n), sc.n_tones, rng);
    for (auto& k : picks) ++k;  // shift past DC
    sig.tone_bins = std::move(picks);

    sig.clean.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t k : sig.tone_bins) acc += twiddle(k * t, n).imag();
        sig.clean[t] = acc;
    }

    // sin(2 pi k t / N) has unitary DFT -i sqrt(N)/2 at k and +i sqrt(N)/2 at N-k.
    sig.spectrum.assign(n, Complex{});
    const double half = std::sqrt(static_cast<double>(n)) / 2.0;
    for (std::size_t k : sig.tone_bins) {
        sig.spectrum[k] = {0.0, -half};
        sig.spectrum[n - k] = {0.0, half};
    }

    double power = 0.0;
    for (double c : sig.clean) power += c * c;
    power /= static_cast<double>(n);
    sig.noise_variance = noise_variance_for(power, sc.snr_db);
    const double sigma = std::sqrt(sig.noise_variance);

    std::normal_distribution<double> gauss(0.0, 1.0);
    sig.noisy.resize(n);
    for (std::size_t t = 0; t < n; ++t) sig.noisy[t] = sig.clean[t] + (sigma > 0.0 ? sigma * gauss(rng) : 0.0);

    sig.sample_times = draw_without_replacement(n, sc.n_samples, rng);
    return sig;
}

ComplexMeasurementStream spectrum_stream_from(const SpectrumSignal& sig, const SpectrumScenario& sc,
                                              std::size_t passes) {
    if (passes == 0) throw std::invalid_argument("gen_spectrum_stream: passes must be positive");
    const std::size_t n = sc.n_bins;
    const std::size_t m = sig.sample_times.size();

    std::vector<ComplexVector> rows(m);
    for (std::size_t j = 0; j < m; ++j) {
        rows[j] = inverse_dft_row(n, sig.sample_times[j]);
        for (auto& v : rows[j]) v = std::conj(v);
    }

    ComplexMeasurementStream stream;
    stream.n_taps = n;
    stream.truth = sig.spectrum;
    stream.inputs.reserve(passes * m * n);
    stream.outputs.reserve(passes * m);

    // Separate generator so the shuffle option leaves the signal untouched.
    Rng order_rng(sc.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t p = 0; p < passes; ++p) {
        if (sc.shuffle_each_pass) std::shuffle(order.begin(), order.end(), order_rng);
        for (std::size_t j : order) stream.push(rows[j], Complex{sig.noisy[sig.sample_times[j]], 0.0});
    }
    return stream;
}

ComplexMeasurementStream gen_spectrum_stream(const SpectrumScenario& sc, std::size_t passes) {
    return spectrum_stream_from(gen_spectrum_signal(sc), sc, passes);
}

ComplexVector unitary_dft(std::span<const double> x) {
    const std::size_t n = x.size();
    ComplexVector out(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc{};
        for (std::size_t t = 0; t < n; ++t) acc += x[t] * std::conj(twiddle(k * t, n));
        out[k] = acc * scale;
    }
    return out;
}

ComplexVector inverse_dft_row(std::size_t n_bins, std::size_t t) {
    ComplexVector row(n_bins);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_bins));
    for (std::size_t k = 0; k < n_bins; ++k) row[k] = twiddle(k * t, n_bins) * scale;
    return row;
}

double esr(std::span<const double> w_true, std::span<const double> w_hat) {
    if (w_true.size() != w_hat.size()) throw std::invalid_argument("esr: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < w_true.size(); ++i) {
        const double d = w_true[i] - w_hat[i];
        num += d * d;
        den += w_true[i] * w_true[i];
    }
    if (den == 0.0) throw std::invalid_argument("esr: true vector is zero");
    return num / den;
}

double esr(std::span<const Complex> w_true, std::span<const Complex> w_hat) {
    if (w_true.size() != w_hat.size()) throw std::invalid_argument("esr: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < w_true.size(); ++i) {
        num += std::norm(w_true[i] - w_hat[i]);
        den += std::norm(w_true[i]);
    }
    if (den == 0.0) throw std::invalid_argument("esr: true vector is zero");
    return num / den;
}

double to_db(double ratio) {
    if (ratio == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ratio);
}

std::uint64_t row_hash(std::span<const double> row) { return fnv1a(row.data(), row.size_bytes()); }
std::uint64_t row_hash(std::span<const Complex> row) { return fnv1a(row.data(), row.size_bytes()); }

void write_stream_csv(const MeasurementStream& stream, const std::filesystem::path& path, bool full_rows) {
    auto out = open_for_write(path);
    out << "index";
    if (full_rows) {
        for (std::size_t k = 0; k < stream.n_taps; ++k) out << ",x" << k;
    } else {
        out << ",x_hash";
    }
    out << ",y\n";
    for (std::size_t n = 0; n < stream.size(); ++n) {
        out << n;
        const auto row = stream.input(n);
        if (full_rows) {
            for (double v : row) out << ',' << fmt_double(v);
        } else {
            out << ',' << fmt_hash(row_hash(row));
        }
        out << ',' << fmt_double(stream.outputs[n]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_stream_csv(const ComplexMeasurementStream& stream, const std::filesystem::path& path,
                      bool full_rows) {
    auto out = open_for_write(path);
    out << "index";
    if (full_rows) {
        for (std::size_t k = 0; k < stream.n_taps; ++k) out << ",x" << k << "_re,x" << k << "_im";
    } else {
        out << ",x_hash";
    }
    out << ",y_re,y_im\n";
    for (std::size_t n = 0; n < stream.size(); ++n) {
        out << n;
        const auto row = stream.input(n);
        if (full_rows) {
            for (const Complex& v : row) out << ',' << fmt_double(v.real()) << ',' << fmt_double(v.imag());
        } else {
            out << ',' << fmt_hash(row_hash(row));
        }
        out << ',' << fmt_double(stream.outputs[n].real()) << ',' << fmt_double(stream.outputs[n].imag()) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace htlms
