#include "htlms/recovery.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace htlms {

namespace {

struct TruthStats {
    double q = std::numeric_limits<double>::infinity();
    std::size_t s = 0;
    double error_sq = 0.0;
};

TruthStats compare(std::span<const double> w_true, std::span<const double> w_hat, const char* what) {
    if (w_true.size() != w_hat.size()) {
        throw std::invalid_argument(std::string(what) + ": length mismatch");
    }
    TruthStats st;
    for (std::size_t i = 0; i < w_true.size(); ++i) {
        if (w_true[i] != 0.0) {
            ++st.s;
            st.q = std::min(st.q, std::abs(w_true[i]));
        }
        const double d = w_true[i] - w_hat[i];
        st.error_sq += d * d;
    }
    if (st.s == 0) throw std::invalid_argument(std::string(what) + ": true vector is zero, q undefined");
    return st;
}

template <typename T>
void check_system(const Matrix<T>& a, std::span<const T> y, std::size_t n, const char* what) {
    if (a.rows == 0 || a.rows != y.size() || a.cols != n || a.data.size() != a.rows * a.cols) {
        throw std::invalid_argument(std::string(what) + ": inconsistent dimensions");
    }
}

inline double conj_if(double v) { return v; }
inline Complex conj_if(const Complex& v) { return std::conj(v); }

// Accumulation order mirrors the streaming filters: residual entries are
// y - sum_i a_i w_i from zero, the gradient is sum_m conj(a_mi) e_m from zero,
// and the update is w + mu * gradient.
template <typename T>
void iht_step_impl(const Matrix<T>& a, std::span<const T> y, std::span<T> w, std::size_t s, double mu) {
    check_system(a, y, w.size(), "iht_step");
    std::vector<T> e(a.rows);
    for (std::size_t m = 0; m < a.rows; ++m) {
        T acc{};
        for (std::size_t i = 0; i < a.cols; ++i) acc += a(m, i) * w[i];
        e[m] = y[m] - acc;
    }
    for (std::size_t i = 0; i < a.cols; ++i) {
        T g{};
        for (std::size_t m = 0; m < a.rows; ++m) g += conj_if(a(m, i)) * e[m];
        w[i] += mu * g;
    }
    hard_threshold_inplace(w, s);
}

}  // namespace

std::string_view guarantee_label(Guarantee g) noexcept {
    switch (g) {
        case Guarantee::ExactSupport: return "exact_support";
        case Guarantee::SupersetSupport: return "superset_support";
        case Guarantee::None: break;
    }
    return "none";
}

RecoveryCertificate theorem1_condition(std::span<const double> w_true, std::span<const double> w_hat) {
    const TruthStats st = compare(w_true, w_hat, "theorem1_condition");
    RecoveryCertificate cert;
    cert.q = st.q;
    cert.error_sq = st.error_sq;
    cert.s = st.s;
    cert.tau = 0;
    cert.bound = st.q * st.q / 2.0;
    cert.condition_holds = st.error_sq < cert.bound;
    cert.guarantee = cert.condition_holds ? Guarantee::ExactSupport : Guarantee::None;
    cert.conclusion_holds = threshold_support(w_hat, st.s) == support(w_true);
    return cert;
}

RecoveryCertificate theorem2_condition(std::span<const double> w_true, std::span<const double> w_hat,
                                       std::size_t d) {
    const TruthStats st = compare(w_true, w_hat, "theorem2_condition");
    if (d <= st.s || d >= w_true.size()) {
        throw std::invalid_argument("theorem2_condition: need s < d < N (s=" + std::to_string(st.s) +
                                    ", d=" + std::to_string(d) + ", N=" + std::to_string(w_true.size()) + ")");
    }
    RecoveryCertificate cert;
    cert.q = st.q;
    cert.error_sq = st.error_sq;
    cert.s = st.s;
    cert.tau = d - st.s;
    cert.bound = st.q * st.q * (1.0 - 1.0 / static_cast<double>(cert.tau + 2));
    cert.condition_holds = st.error_sq <= cert.bound && l0_norm(w_hat) >= d;
    cert.guarantee = cert.condition_holds ? Guarantee::SupersetSupport : Guarantee::None;
    cert.conclusion_holds = threshold_support(w_hat, d).includes(support(w_true));
    return cert;
}

double ser_lower_bound(std::size_t s, std::optional<std::size_t> tau) {
    if (s == 0) throw std::invalid_argument("ser_lower_bound: s must be positive");
    const double sd = static_cast<double>(s);
    if (!tau) return 2.0 * sd;
    if (*tau == 0) throw std::invalid_argument("ser_lower_bound: tau must be positive");
    return sd / (1.0 - 1.0 / static_cast<double>(*tau + 2));
}

double sza_bias_residual(std::span<const double> w_true, std::span<const double> w_inf_mean,
                         std::span<const double> covariance, double mu, double rho,
                         std::span<const double> penalty_mean) {
    const std::size_t n = w_true.size();
    if (w_inf_mean.size() != n || penalty_mean.size() != n || covariance.size() != n * n) {
        throw std::invalid_argument("sza_bias_residual: dimension mismatch");
    }
    if (!(mu > 0.0)) throw std::invalid_argument("sza_bias_residual: mu must be positive");

    using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vec = Eigen::VectorXd;
    const Eigen::Map<const Mat> r(covariance.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double scale = r.cwiseAbs().maxCoeff();
    if (!((r - r.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale)) {
        throw std::invalid_argument("sza_bias_residual: covariance is not symmetric");
    }
    const Eigen::LLT<Mat> llt(r);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("sza_bias_residual: covariance is singular or not positive definite");
    }
    const Eigen::Map<const Vec> w(w_true.data(), static_cast<Eigen::Index>(n));
    const Eigen::Map<const Vec> w_inf(w_inf_mean.data(), static_cast<Eigen::Index>(n));
    const Eigen::Map<const Vec> p(penalty_mean.data(), static_cast<Eigen::Index>(n));
    const Vec predicted = w - (rho / mu) * llt.solve(p);
    return (w_inf - predicted).norm();
}

void iht_step(const Matrix<double>& a, std::span<const double> y, std::span<double> w, std::size_t sparsity,
              double mu) {
    iht_step_impl(a, y, w, sparsity, mu);
}

void iht_step(const Matrix<Complex>& a, std::span<const Complex> y, std::span<Complex> w,
              std::size_t sparsity, double mu) {
    iht_step_impl(a, y, w, sparsity, mu);
}

RealVector batch_iht(const Matrix<double>& a, std::span<const double> y, std::size_t sparsity, double mu,
                     std::size_t iters) {
    RealVector w(a.cols, 0.0);
    check_system(a, y, w.size(), "batch_iht");
    for (std::size_t k = 0; k < iters; ++k) iht_step(a, y, std::span<double>(w), sparsity, mu);
    return w;
}

ComplexVector batch_iht(const Matrix<Complex>& a, std::span<const Complex> y, std::size_t sparsity,
                        double mu, std::size_t iters) {
    ComplexVector w(a.cols);
    check_system(a, y, w.size(), "batch_iht");
    for (std::size_t k = 0; k < iters; ++k) iht_step(a, y, std::span<Complex>(w), sparsity, mu);
    return w;
}

}  // namespace htlms
