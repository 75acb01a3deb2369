#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "htlms/threshold.hpp"
#include "oracles.hpp"

using namespace htlms;

namespace {

SupportSet set_of(std::initializer_list<std::size_t> idx) { return SupportSet{std::vector<std::size_t>(idx)}; }

}  // namespace

TEST_CASE("support lists nonzero positions") {
    CHECK(support(RealVector{2, -2, 1, 0}) == set_of({0, 1, 2}));
    CHECK(support(RealVector{0, 0, 0}).empty());
    CHECK(support(RealVector{0, 3, 0, -1}) == set_of({1, 3}));
    CHECK(l0_norm(RealVector{0, 3, 0, -1}) == 2);
}

TEST_CASE("hard threshold on the worked example") {
    const RealVector x0{2, -2, 1, 0};
    CHECK(hard_threshold(x0, 2) == RealVector{2, -2, 0, 0});
    // Tie at the first slot keeps both.
    CHECK(hard_threshold(x0, 1) == RealVector{2, -2, 0, 0});
    CHECK(hard_threshold(x0, 4) == x0);
    CHECK(hard_threshold(RealVector{0, 0, 0, 0}, 3) == RealVector{0, 0, 0, 0});
}

TEST_CASE("hard threshold rejects out-of-range sparsity") {
    const RealVector v{1, 2, 3};
    CHECK_THROWS_AS(hard_threshold(v, 0), std::invalid_argument);
    CHECK_THROWS_AS(hard_threshold(v, 4), std::invalid_argument);
    CHECK_THROWS_AS(penalty_mask(v, 0), std::invalid_argument);
}

TEST_CASE("hard threshold keeps everything when fewer than s nonzeros") {
    CHECK(hard_threshold(RealVector{0, 5, 0, 0, -1}, 3) == RealVector{0, 5, 0, 0, -1});
}

TEST_CASE("penalty mask") {
    CHECK(penalty_mask(RealVector{2, -2, 1, 0}, 1) == RealVector{0, 0, 1, 0});
    CHECK(penalty_mask(RealVector{5, -3, 0, 0}, 2) == RealVector{0, 0, 0, 0});
    CHECK(penalty_mask(RealVector{0, 0, 0}, 1) == RealVector{0, 0, 0});
    CHECK(penalty_mask(RealVector{0.5, -4, 0.25, -0.1}, 1) == RealVector{1, 0, 1, -1});
}

TEST_CASE("complex hard threshold ranks by magnitude") {
    const ComplexVector u{{0, 3}, {1, 1}, {0, 0}};
    CHECK(hard_threshold(u, 1) == ComplexVector{{0, 3}, {0, 0}, {0, 0}});
    const ComplexVector tie{{1, 0}, {0, 1}};
    CHECK(hard_threshold(tie, 1) == tie);
    CHECK(threshold_support(tie, 1) == set_of({0, 1}));
}

TEST_CASE("threshold_support matches support of the thresholded vector") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng() % 24;
        const std::size_t s = 1 + rng() % n;
        const auto v = oracle::tie_prone_vector(rng, n);
        CHECK(threshold_support(v, s) == support(hard_threshold(v, s)));
    }
}

TEST_CASE("threshold properties on random vectors") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5000; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        const std::size_t s = 1 + rng() % n;
        const auto v = trial % 2 ? oracle::tie_prone_vector(rng, n) : oracle::gaussian_vector(rng, n);
        const auto h = hard_threshold(v, s);

        CHECK(hard_threshold(h, s) == h);

        double min_kept = INFINITY;
        double max_dropped = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE((h[i] == 0.0 || h[i] == v[i]));
            if (h[i] != 0.0) min_kept = std::min(min_kept, std::abs(v[i]));
            if (h[i] == 0.0) max_dropped = std::max(max_dropped, std::abs(v[i]));
        }
        if (l0_norm(h) > 0) CHECK(min_kept >= max_dropped);
        CHECK(l0_norm(h) >= std::min(s, l0_norm(v)));

        if (s < n) {
            const auto p = penalty_mask(v, s);
            CHECK(support(p).overlap(support(h)) == 0);
        }
    }
}

TEST_CASE("distinct magnitudes give exactly min(s, ||v||_0) survivors") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        const std::size_t s = 1 + rng() % n;
        auto v = oracle::gaussian_vector(rng, n);
        for (std::size_t i = 0; i < n; i += 3) v[i] = 0.0;
        CHECK(l0_norm(hard_threshold(v, s)) == std::min(s, l0_norm(v)));
    }
}

TEST_CASE("agrees with the exhaustive subset oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        const std::size_t s = 1 + rng() % n;
        const auto v = oracle::tie_prone_vector(rng, n);
        CHECK(hard_threshold(v, s) == oracle::hard_threshold_by_subsets(v, s));
    }
}

TEST_CASE("complex threshold agrees with the subset oracle") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> val(-2, 2);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        const std::size_t s = 1 + rng() % n;
        ComplexVector v(n);
        for (auto& z : v) z = {static_cast<double>(val(rng)), static_cast<double>(val(rng))};
        CHECK(hard_threshold(v, s) == oracle::hard_threshold_by_subsets(v, s));
    }
}
