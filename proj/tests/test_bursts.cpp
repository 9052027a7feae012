#include <cmath>

#include <doctest.h>

#include "smp/analytics.hpp"
#include "smp/bursts.hpp"

using namespace smp;

TEST_CASE("burst-count probabilities sum to one exactly") {
    for (std::int64_t tau : {0, 1, 5, 12, 40}) {
        for (const Rational& r : {Rational(1, 10), Rational(1, 3), Rational(9, 10)}) {
            Rational total = 0;
            for (std::int64_t k = 0; k <= tau + 3; ++k)
                total += burst_count_pmf_exact(tau, k, r);
            CHECK(total == 1);
            CHECK(burst_count_pmf_exact(tau, 0, r) == 0);
            CHECK(burst_count_pmf_exact(tau, tau + 2, r) == 0);
        }
    }
}

TEST_CASE("visit counts total (tau+1) per realization") {
    // Every realization with k bursts occupies exactly tau+1 time slots, so
    // sum_m M^(k,m) = C(tau, k-1) (tau+1).
    for (std::int64_t tau : {1, 4, 9, 15}) {
        for (std::int64_t k = 1; k <= tau + 1; ++k) {
            BigInt total = 0;
            for (std::int64_t m = 0; m <= tau; ++m) total += visit_count(tau, k, m);
            CHECK(total == binomial(tau, k - 1) * (tau + 1));
        }
    }
}

TEST_CASE("burst durations total tau+1 time steps per realization") {
    // Burst durations (m+1 steps each) partition the tau+1 slots, so
    // sum_m (m+1) K^(k,m) = C(tau, k-1) (tau+1).
    for (std::int64_t tau : {1, 4, 9, 15}) {
        for (std::int64_t k = 1; k <= tau + 1; ++k) {
            BigInt total = 0;
            for (std::int64_t m = 0; m <= tau; ++m)
                total += (m + 1) * burst_duration_count(tau, k, m);
            CHECK(total == binomial(tau, k - 1) * (tau + 1));
        }
    }
}

TEST_CASE("each realization with k bursts has exactly k of them") {
    for (std::int64_t tau : {1, 4, 9, 15}) {
        for (std::int64_t k = 1; k <= tau + 1; ++k) {
            BigInt total = 0;
            for (std::int64_t m = 0; m <= tau; ++m)
                total += burst_duration_count(tau, k, m);
            CHECK(total == k * binomial(tau, k - 1));
        }
    }
}

TEST_CASE("time-average occupation is the visit-count mixture") {
    // (tau+1) P(level m) = sum_k M^(k,m) r^{k-1} (1-r)^{tau-k+1}, exactly.
    for (std::int64_t tau : {1, 3, 8, 14}) {
        for (const Rational& r : {Rational(1, 10), Rational(2, 7)}) {
            const Rational keep = 1 - r;
            for (std::int64_t m = 0; m <= tau; ++m) {
                Rational mix = 0;
                for (std::int64_t k = 1; k <= tau + 1; ++k) {
                    Rational p = 1;
                    for (std::int64_t i = 0; i < k - 1; ++i) p *= r;
                    for (std::int64_t i = 0; i < tau - k + 1; ++i) p *= keep;
                    mix += Rational(visit_count(tau, k, m)) * p;
                }
                CHECK(mix == time_average_occupation_exact(m, tau, r) * (tau + 1));
            }
        }
    }
}

TEST_CASE("exhaustive enumeration reproduces every closed form") {
    for (std::int64_t tau : {1, 2, 5, 10}) {
        for (const Rational& r : {Rational(1, 10), Rational(1, 3)}) {
            const EnumerationResult res = enumerate_realizations(tau, r);
            const BurstTable table = burst_table(tau, r);
            for (std::int64_t k = 1; k <= tau + 1; ++k) {
                CHECK(res.table.rho[k - 1] == table.rho[k - 1]);
                for (std::int64_t m = 0; m <= tau; ++m) {
                    CHECK(res.table.K[k - 1][m] == table.K[k - 1][m]);
                    CHECK(res.table.M[k - 1][m] == table.M[k - 1][m]);
                }
            }
            for (std::int64_t m = 0; m <= tau; ++m)
                CHECK(res.time_average[m] ==
                      time_average_occupation_exact(m, tau, r));
        }
    }
}

TEST_CASE("enumerated occupation matches the exact transient law") {
    const std::int64_t tau = 8;
    const double r = 0.25;
    const EnumerationResult res = enumerate_realizations(tau, Rational(1, 4));
    const DiscreteUniformSpec spec(1.5, r);
    for (std::int64_t t = 0; t <= tau; ++t)
        for (std::int64_t m = 0; m <= t; ++m)
            CHECK(static_cast<double>(res.occupation[t][m]) ==
                  doctest::Approx(occupation_probability(spec, m, t))
                      .epsilon(1e-13));
}

TEST_CASE("floating-point helpers agree with the exact rationals") {
    const std::int64_t tau = 12;
    const double r = 0.3;
    const Rational rq(3, 10);
    for (std::int64_t k = 1; k <= tau + 1; ++k)
        CHECK(burst_count_pmf(tau, k, r) ==
              doctest::Approx(static_cast<double>(burst_count_pmf_exact(tau, k, rq)))
                  .epsilon(1e-12));
    for (std::int64_t m = 0; m <= tau; ++m)
        CHECK(time_average_occupation(m, tau, r) ==
              doctest::Approx(
                  static_cast<double>(time_average_occupation_exact(m, tau, rq)))
                  .epsilon(1e-12));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(burst_count_pmf_exact(-1, 1, Rational(1, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(time_average_occupation(5, 4, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_realizations(21, Rational(1, 2)),
                    std::invalid_argument);
}
