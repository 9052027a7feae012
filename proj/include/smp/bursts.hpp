#pragma once

// Exact combinatorics of realization dissection: burst-count probabilities,
// burst-duration counts, value-visit counts, and the time-average occupation
// law, all in exact rational / big-integer arithmetic, together with an
// exhaustive enumeration oracle over all 2^tau grow/reset sequences.
//
// Convention (resolved against the oracle): a "burst" is a maximal run of
// multiplicative growth; the final burst, truncated at the horizon tau, is
// counted like any reset-terminated one. A burst of duration m+1 steps
// visits the levels 1, mu, ..., mu^m.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace smp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt acc = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        acc *= n - k + i;
        acc /= i;
    }
    return acc;
}

// rho_tau^(k): probability of exactly k bursts (k-1 resets) up to time tau.
// Zero outside k in [1, tau+1].
inline Rational burst_count_pmf_exact(std::int64_t tau, std::int64_t k,
                                      const Rational& r) {
    if (tau < 0) throw std::invalid_argument("tau must be nonnegative");
    if (k < 1 || k > tau + 1) return 0;
    Rational p = binomial(tau, k - 1);
    const Rational keep = 1 - r;
    for (std::int64_t i = 0; i < tau - k + 1; ++i) p *= keep;
    for (std::int64_t i = 0; i < k - 1; ++i) p *= r;
    return p;
}

inline double burst_count_pmf(std::int64_t tau, std::int64_t k, double r) {
    if (tau < 0) throw std::invalid_argument("tau must be nonnegative");
    if (k < 1 || k > tau + 1) return 0.0;
    return static_cast<double>(binomial(tau, k - 1)) *
           std::pow(1.0 - r, static_cast<double>(tau - k + 1)) *
           std::pow(r, static_cast<double>(k - 1));
}

// K_tau^(k,m): among realizations with exactly k bursts, the number of
// bursts of duration m+1 steps.
inline BigInt burst_duration_count(std::int64_t tau, std::int64_t k,
                                   std::int64_t m) {
    if (tau < 0) throw std::invalid_argument("tau must be nonnegative");
    if (m < 0 || k < 1) return 0;
    if (k == 1) return m == tau ? 1 : 0;
    if (k <= tau - m + 1) return k * binomial(tau - m - 1, k - 2);
    return 0;
}

// M_tau^(k,m): total number of times x_t = mu^m over all realizations with
// exactly k bursts.
inline BigInt visit_count(std::int64_t tau, std::int64_t k, std::int64_t m) {
    if (tau < 0) throw std::invalid_argument("tau must be nonnegative");
    if (m < 0 || k < 1) return 0;
    if (k <= tau - m + 1) return k * binomial(tau - m, k - 1);
    return 0;
}

// Probability of observing level m at a uniformly random time t <= tau.
inline Rational time_average_occupation_exact(std::int64_t m, std::int64_t tau,
                                              const Rational& r) {
    if (tau < 0 || m < 0 || m > tau)
        throw std::invalid_argument("need 0 <= m <= tau");
    Rational p = 1 + r * (tau - m);
    p /= tau + 1;
    const Rational keep = 1 - r;
    for (std::int64_t i = 0; i < m; ++i) p *= keep;
    return p;
}

inline double time_average_occupation(std::int64_t m, std::int64_t tau,
                                      double r) {
    if (tau < 0 || m < 0 || m > tau)
        throw std::invalid_argument("need 0 <= m <= tau");
    return (1.0 + r * static_cast<double>(tau - m)) /
           static_cast<double>(tau + 1) *
           std::pow(1.0 - r, static_cast<double>(m));
}

struct BurstTable {
    std::int64_t tau;
    std::vector<Rational> rho;              // index k-1, k = 1..tau+1
    std::vector<std::vector<BigInt>> K;     // [k-1][m]
    std::vector<std::vector<BigInt>> M;     // [k-1][m]
};

// Closed-form table from the formulas above.
inline BurstTable burst_table(std::int64_t tau, const Rational& r) {
    if (tau < 0) throw std::invalid_argument("tau must be nonnegative");
    BurstTable t;
    t.tau = tau;
    for (std::int64_t k = 1; k <= tau + 1; ++k) {
        t.rho.push_back(burst_count_pmf_exact(tau, k, r));
        std::vector<BigInt> krow, mrow;
        for (std::int64_t m = 0; m <= tau; ++m) {
            krow.push_back(burst_duration_count(tau, k, m));
            mrow.push_back(visit_count(tau, k, m));
        }
        t.K.push_back(std::move(krow));
        t.M.push_back(std::move(mrow));
    }
    return t;
}

struct EnumerationResult {
    BurstTable table;
    // occupation[t][m] = P(x_t = mu^m), t = 0..tau
    std::vector<std::vector<Rational>> occupation;
    // time_average[m] = P(level m at a uniformly random time <= tau)
    std::vector<Rational> time_average;
};

// Brute force over all 2^tau grow/reset sequences; tau <= 20.
inline EnumerationResult enumerate_realizations(std::int64_t tau,
                                                const Rational& r) {
    if (tau < 0) throw std::invalid_argument("tau must be nonnegative");
    if (tau > 20) throw std::invalid_argument("enumeration capped at tau = 20");
    const Rational keep = 1 - r;

    EnumerationResult res;
    res.table.tau = tau;
    res.table.rho.assign(tau + 1, 0);  // k = 1..tau+1
    res.table.K.assign(tau + 1, std::vector<BigInt>(tau + 1, 0));
    res.table.M.assign(tau + 1, std::vector<BigInt>(tau + 1, 0));
    res.occupation.assign(tau + 1, std::vector<Rational>(tau + 1, 0));
    res.time_average.assign(tau + 1, 0);

    // Sequence probabilities r^j (1-r)^(tau-j) by reset count j.
    std::vector<Rational> prob_by_resets(tau + 1, 1);
    for (std::int64_t j = 0; j <= tau; ++j) {
        Rational p = 1;
        for (std::int64_t i = 0; i < j; ++i) p *= r;
        for (std::int64_t i = 0; i < tau - j; ++i) p *= keep;
        prob_by_resets[j] = p;
    }

    std::vector<std::int64_t> level(tau + 1);
    const std::uint64_t total = std::uint64_t(1) << tau;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        // Bit i-1 set means a reset at step i.
        std::int64_t resets = 0;
        level[0] = 0;
        for (std::int64_t i = 1; i <= tau; ++i) {
            if (mask >> (i - 1) & 1) {
                level[i] = 0;
                ++resets;
            } else {
                level[i] = level[i - 1] + 1;
            }
        }
        const std::int64_t k = resets + 1;
        const Rational& p = prob_by_resets[resets];

        res.table.rho[k - 1] += p;
        for (std::int64_t t = 0; t <= tau; ++t) {
            res.occupation[t][level[t]] += p;
            res.time_average[level[t]] += p;
            res.table.M[k - 1][level[t]] += 1;
        }
        // Burst tops: the level just before each reset, plus the final level.
        for (std::int64_t i = 1; i <= tau; ++i)
            if (mask >> (i - 1) & 1) res.table.K[k - 1][level[i - 1]] += 1;
        res.table.K[k - 1][level[tau]] += 1;
    }
    for (auto& q : res.time_average) q /= tau + 1;
    return res;
}

}  // namespace smp
