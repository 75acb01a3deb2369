#ifndef HTLMS_THRESHOLD_HPP
#define HTLMS_THRESHOLD_HPP

// Hard threshold operator H_s, the selective penalty operator P_s and
// support utilities. Everything here is a pure function over spans, usable
// for both real and complex tap vectors.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace htlms {

using RealVector = std::vector<double>;
using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Ordered set of coefficient positions holding nonzero values.
struct SupportSet {
    std::vector<std::size_t> indices;  // strictly increasing

    std::size_t size() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }
    bool contains(std::size_t i) const {
        return std::binary_search(indices.begin(), indices.end(), i);
    }
    bool includes(const SupportSet& other) const {
        return std::includes(indices.begin(), indices.end(),
                             other.indices.begin(), other.indices.end());
    }
    std::size_t overlap(const SupportSet& other) const;

    friend bool operator==(const SupportSet&, const SupportSet&) = default;
};

inline std::size_t SupportSet::overlap(const SupportSet& other) const {
    std::size_t count = 0;
    auto a = indices.begin();
    auto b = other.indices.begin();
    while (a != indices.end() && b != other.indices.end()) {
        if (*a < *b) {
            ++a;
        } else if (*b < *a) {
            ++b;
        } else {
            ++count;
            ++a;
            ++b;
        }
    }
    return count;
}

namespace detail {

// Ranking key. Squared magnitude for complex entries: monotone in |z|, so
// the ordering (and the exact-equality tie test) is unchanged.
inline double rank_key(double v) noexcept { return v < 0.0 ? -v : v; }
inline double rank_key(const Complex& v) noexcept { return std::norm(v); }

inline bool is_nonzero(double v) noexcept { return v != 0.0; }
inline bool is_nonzero(const Complex& v) noexcept { return v != Complex{}; }

inline void check_sparsity(std::size_t s, std::size_t n, const char* what) {
    if (s == 0 || s > n) {
        throw std::invalid_argument(std::string(what) + ": sparsity " + std::to_string(s) +
                                    " outside [1, " + std::to_string(n) + "]");
    }
}

// s-th largest ranking key of v (1-based). Entries with key >= the result
// are exactly the ones H_s keeps.
template <typename T>
double kth_largest_key(std::span<const T> v, std::size_t s) {
    std::vector<double> keys(v.size());
    std::transform(v.begin(), v.end(), keys.begin(), [](const T& x) { return rank_key(x); });
    auto nth = keys.begin() + static_cast<std::ptrdiff_t>(s - 1);
    std::nth_element(keys.begin(), nth, keys.end(), std::greater<>{});
    return *nth;
}

}  // namespace detail

/// Positions of the nonzero entries of v.
template <typename T>
SupportSet support(std::span<const T> v) {
    SupportSet out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (detail::is_nonzero(v[i])) out.indices.push_back(i);
    }
    return out;
}

template <typename T>
SupportSet support(const std::vector<T>& v) {
    return support(std::span<const T>(v));
}

template <typename T>
std::size_t l0_norm(std::span<const T> v) {
    return static_cast<std::size_t>(
        std::count_if(v.begin(), v.end(), [](const T& x) { return detail::is_nonzero(x); }));
}

template <typename T>
std::size_t l0_norm(const std::vector<T>& v) {
    return l0_norm(std::span<const T>(v));
}

/// In-place H_s. Keeps every entry whose magnitude is at least the s-th
/// largest magnitude, so all entries tying for the last slot survive.
/// s == v.size() is the identity; s == 0 is rejected.
template <typename T>
void hard_threshold_inplace(std::span<T> v, std::size_t s) {
    detail::check_sparsity(s, v.size(), "hard_threshold");
    if (s == v.size()) return;
    const double cut = detail::kth_largest_key(std::span<const T>(v), s);
    for (auto& x : v) {
        if (detail::rank_key(x) < cut) x = T{};
    }
}

template <typename T>
std::vector<T> hard_threshold(std::span<const T> v, std::size_t s) {
    std::vector<T> out(v.begin(), v.end());
    hard_threshold_inplace(std::span<T>(out), s);
    return out;
}

template <typename T>
std::vector<T> hard_threshold(const std::vector<T>& v, std::size_t s) {
    return hard_threshold(std::span<const T>(v), s);
}

/// support(H_s(v)) without materializing the thresholded vector.
template <typename T>
SupportSet threshold_support(std::span<const T> v, std::size_t s) {
    detail::check_sparsity(s, v.size(), "threshold_support");
    const double cut = s == v.size() ? 0.0 : detail::kth_largest_key(v, s);
    SupportSet out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (detail::is_nonzero(v[i]) && detail::rank_key(v[i]) >= cut) out.indices.push_back(i);
    }
    return out;
}

template <typename T>
SupportSet threshold_support(const std::vector<T>& v, std::size_t s) {
    return threshold_support(std::span<const T>(v), s);
}

/// sgn with sgn(0) = 0.
inline double sgn(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// P_s written into out: 0 on support(H_s(v)), sgn(v_i) elsewhere.
inline void penalty_mask_into(std::span<const double> v, std::size_t s, std::span<double> out) {
    detail::check_sparsity(s, v.size(), "penalty_mask");
    if (out.size() != v.size()) throw std::invalid_argument("penalty_mask: output length mismatch");
    const double cut = s == v.size() ? 0.0 : detail::kth_largest_key(v, s);
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = detail::rank_key(v[i]) >= cut ? 0.0 : sgn(v[i]);
    }
}

inline RealVector penalty_mask(std::span<const double> v, std::size_t s) {
    RealVector out(v.size());
    penalty_mask_into(v, s, out);
    return out;
}

inline RealVector penalty_mask(const RealVector& v, std::size_t s) {
    return penalty_mask(std::span<const double>(v), s);
}

}  // namespace htlms

#endif  // HTLMS_THRESHOLD_HPP
