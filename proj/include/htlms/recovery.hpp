#ifndef HTLMS_RECOVERY_HPP
#define HTLMS_RECOVERY_HPP

// Support-recovery guarantees for the hard threshold operator, the signal
// to error ratio bounds they imply, the stationarity equation of SZA-LMS
// and the batch iterative hard thresholding recursion.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "htlms/threshold.hpp"

namespace htlms {

enum class Guarantee { None, ExactSupport, SupersetSupport };

std::string_view guarantee_label(Guarantee g) noexcept;

struct RecoveryCertificate {
    double q = 0.0;         // smallest nonzero |w_i|
    double error_sq = 0.0;  // ||w - w_hat||^2
    std::size_t s = 0;      // ||w||_0
    std::size_t tau = 0;    // d - s, zero for the exact-support check
    double bound = 0.0;     // right-hand side the error is compared with
    bool condition_holds = false;
    Guarantee guarantee = Guarantee::None;
    /// Whether the support conclusion actually holds for this pair. Set
    /// whether or not the hypothesis does.
    bool conclusion_holds = false;
};

/// Exact-support check: ||w - w_hat||^2 < q^2 / 2 (strict) guarantees
/// support(H_s(w_hat)) = support(w).
RecoveryCertificate theorem1_condition(std::span<const double> w_true, std::span<const double> w_hat);

/// Superset check for H_d with d = s + tau: ||w - w_hat||^2 <= q^2 (1 - 1/(tau+2))
/// together with ||w_hat||_0 >= d guarantees support(H_d(w_hat)) ⊇ support(w).
/// Requires s < d < N.
RecoveryCertificate theorem2_condition(std::span<const double> w_true, std::span<const double> w_hat,
                                       std::size_t d);

/// 2s without tau, s / (1 - 1/(tau+2)) with it.
double ser_lower_bound(std::size_t s, std::optional<std::size_t> tau = std::nullopt);

/// Residual of the SZA-LMS limit equation
///   E[w(inf)] = w - (rho/mu) R_x^{-1} E[P_s(w(inf))]
/// i.e. || w_inf_mean - (w_true - (rho/mu) R_x^{-1} penalty_mean) ||_2.
/// covariance is N x N row-major and must be symmetric positive definite.
double sza_bias_residual(std::span<const double> w_true, std::span<const double> w_inf_mean,
                         std::span<const double> covariance, double mu, double rho,
                         std::span<const double> penalty_mean);

/// Dense row-major M x N matrix.
template <typename T>
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(std::size_t m, std::size_t n) : rows(m), cols(n), data(m * n) {}

    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::span<const T> row(std::size_t i) const {
        return std::span<const T>(data).subspan(i * cols, cols);
    }
};

/// One IHT iteration applied to w in place.
void iht_step(const Matrix<double>& a, std::span<const double> y, std::span<double> w, std::size_t sparsity,
              double mu);
void iht_step(const Matrix<Complex>& a, std::span<const Complex> y, std::span<Complex> w,
              std::size_t sparsity, double mu);

/// w(k+1) = H_s(w(k) + mu A^T (y - A w(k))), w(0) = 0. Returns w(iters).
RealVector batch_iht(const Matrix<double>& a, std::span<const double> y, std::size_t sparsity, double mu,
                     std::size_t iters);

/// Complex variant for y = A w: w(k+1) = H_s(w(k) + mu A^H (y - A w(k))).
/// One step with M = 1 matches complex_hard_lms_step fed x = conj(a_row)
/// and observation conj(y).
ComplexVector batch_iht(const Matrix<Complex>& a, std::span<const Complex> y, std::size_t sparsity,
                        double mu, std::size_t iters);

}  // namespace htlms

#endif  // HTLMS_RECOVERY_HPP
