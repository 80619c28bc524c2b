#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adboin/errors.hpp"
#include "adboin/quasibeta.hpp"
#include "oracles.hpp"

#include <random>

using namespace adboin;

namespace {
const Benchmark kDefaultBench{41.0, 0.705};
}

TEST_CASE("quasi events weight each patient by standardized utility") {
    UtilityWeights w;
    CHECK(quasi_events(OutcomeCounts2x2{1, 0, 2, 0}, w) == doctest::Approx(1.8));
    CHECK(quasi_events(OutcomeCounts2x2{}, w) == 0.0);
    CHECK(quasi_events(OutcomeCounts2x2{0, 0, 0, 3}, w) == 0.0);
    CHECK_THROWS_AS(quasi_events(OutcomeCounts2x2{-1, 0, 0, 0}, w), Error);
}

TEST_CASE("default weights are marginally sufficient") {
    UtilityWeights w;
    REQUIRE(w.marginally_sufficient());
    std::mt19937 gen(11);
    std::uniform_int_distribution<int> cell(0, 8);
    for (int i = 0; i < 500; ++i) {
        OutcomeCounts2x2 t{cell(gen), cell(gen), cell(gen), cell(gen)};
        const double expect = 0.4 * t.n() + 0.6 * t.n_eff() - 0.4 * t.n_tox();
        CHECK(quasi_events(t, w) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(quasi_events(t.n(), t.n_tox(), t.n_eff(), w) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    UtilityWeights skewed{100, 50, 40, 0};
    CHECK_FALSE(skewed.marginally_sufficient());
    CHECK_THROWS_AS(quasi_events(3, 1, 1, skewed), Error);
}

TEST_CASE("regularized incomplete beta closed forms") {
    CHECK(regularized_incomplete_beta(0.705, 1, 1) == doctest::Approx(0.705).epsilon(1e-14));
    CHECK(regularized_incomplete_beta(0.705, 3, 2) ==
          doctest::Approx(0.660508948125).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(0.0, 2, 3) == 0.0);
    CHECK(regularized_incomplete_beta(1.0, 2, 3) == 1.0);
    // mpmath reference values
    CHECK(std::fabs(regularized_incomplete_beta(0.3, 2.5, 7.25) - 0.66048227358190722) < 1e-12);
    CHECK(std::fabs(regularized_incomplete_beta(0.5, 20, 20) - 0.5) < 1e-12);
    CHECK(std::fabs(regularized_incomplete_beta(0.05, 12.2, 0.7)) < 1e-15);
}

TEST_CASE("regularized incomplete beta rejects bad domains") {
    CHECK_THROWS_AS(regularized_incomplete_beta(-0.1, 1, 1), Error);
    CHECK_THROWS_AS(regularized_incomplete_beta(1.1, 1, 1), Error);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 0.0, 1), Error);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.5, 1, -2), Error);
    try {
        regularized_incomplete_beta(0.5, -1, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
}

TEST_CASE("incomplete beta symmetry and quadrature agreement") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> ux(0.0, 1.0), ushape(0.5, 20.0);
    for (int i = 0; i < 300; ++i) {
        const double x = ux(gen), a = ushape(gen), b = ushape(gen);
        const double v = regularized_incomplete_beta(x, a, b);
        CHECK(v + regularized_incomplete_beta(1.0 - x, b, a) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::fabs(v - oracle::beta_cdf_quadrature(x, a, b)) < 1e-8);
    }
}

TEST_CASE("desirability probability") {
    CHECK(desirability_probability(0, 0.0, kDefaultBench) == doctest::Approx(0.295).epsilon(1e-13));
    CHECK(desirability_probability(3, 2.0, kDefaultBench) ==
          doctest::Approx(0.339491051875).epsilon(1e-12));
    CHECK_THROWS_AS(desirability_probability(3, 3.5, kDefaultBench), Error);
    CHECK_THROWS_AS(desirability_probability(3, -0.5, kDefaultBench), Error);

    const double sampled = oracle::beta_tail_sampling(1 + 3.6, 1 + 6 - 3.6, 0.705, 1'000'000, 5);
    CHECK(std::fabs(desirability_probability(6, 3.6, kDefaultBench) - sampled) < 0.005);
}

TEST_CASE("desirability probability increases with quasi events") {
    for (int n : {1, 3, 6, 9, 12, 36}) {
        double prev = -1.0;
        for (int k = 0; k <= 10 * n; ++k) {
            const double dp = desirability_probability(n, k / 10.0, kDefaultBench);
            CHECK(dp > prev);
            prev = dp;
        }
    }
}

TEST_CASE("benchmark from acceptable margins") {
    UtilityWeights w;
    auto b = benchmark_from(0.35, 0.25, w);
    CHECK(b.u_b == doctest::Approx(41.0).epsilon(1e-13));
    CHECK(b.u_tilde == doctest::Approx(0.705).epsilon(1e-13));
    b = benchmark_from(0.0, 1.0, w);
    CHECK(b.u_b == doctest::Approx(100.0));
    CHECK(b.u_tilde == doctest::Approx(1.0));
    b = benchmark_from(1.0, 0.0, w);
    CHECK(b.u_b == doctest::Approx(0.0));
    CHECK(b.u_tilde == doctest::Approx(0.5));
    CHECK_THROWS_AS(benchmark_from(1.2, 0.25, w), Error);
    CHECK_THROWS_AS(benchmark_from(0.35, -0.1, w), Error);
}

TEST_CASE("tail posterior") {
    CHECK(tail_posterior(3, 3, 0.35, Tail::Above) == doctest::Approx(0.98499375).epsilon(1e-12));
    CHECK(tail_posterior(0, 9, 0.25, Tail::Below) ==
          doctest::Approx(0.94368648529052734).epsilon(1e-12));
    CHECK(tail_posterior(0, 0, 0.5, Tail::Above) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(tail_posterior(4, 3, 0.35, Tail::Above), Error);
    for (int n : {3, 6, 12}) {
        for (int e = 1; e <= n; ++e)
            CHECK(tail_posterior(e, n, 0.35, Tail::Above) > tail_posterior(e - 1, n, 0.35, Tail::Above));
    }
}
