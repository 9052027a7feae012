#pragma once

// Binned oracle masses for the closed-form densities, and the
// total-variation distance between an empirical histogram and its oracle.
// Underflow/overflow mass is folded into the comparison so nothing is
// silently discarded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "smp/analytics.hpp"
#include "smp/bursts.hpp"
#include "smp/continuum.hpp"
#include "smp/histogram.hpp"

namespace smp {

struct BinnedOracle {
    std::vector<double> bin_mass;  // aligned with the histogram bins
    double underflow_mass = 0.0;
    double overflow_mass = 0.0;
};

inline double tv_distance(const LogHistogram& hist, const BinnedOracle& oracle) {
    const double n = static_cast<double>(hist.total());
    double sum = std::abs(static_cast<double>(hist.underflow()) / n -
                          oracle.underflow_mass) +
                 std::abs(static_cast<double>(hist.overflow()) / n -
                          oracle.overflow_mass);
    for (std::size_t i = 0; i < hist.bins(); ++i)
        sum += std::abs(hist.mass(i) - oracle.bin_mass[i]);
    return 0.5 * sum;
}

// Exact occupation masses of the uniform discrete process binned on a
// level-aligned histogram (one level per bin).
inline BinnedOracle occupation_oracle(const DiscreteUniformSpec& spec,
                                      std::int64_t t, const LogHistogram& hist) {
    BinnedOracle o;
    o.bin_mass.assign(hist.bins(), 0.0);
    double covered = 0.0;
    for (std::int64_t m = 0; m <= t; ++m) {
        const double p = occupation_probability(spec, m, t);
        const double y = static_cast<double>(m) * std::log(spec.mu);
        const double pos = (y - hist.y_lo()) / hist.dy();
        if (pos < 0.0) {
            o.underflow_mass += p;
        } else if (static_cast<std::size_t>(pos) >= hist.bins()) {
            o.overflow_mass += p;
        } else {
            o.bin_mass[static_cast<std::size_t>(pos)] += p;
        }
        covered += p;
    }
    o.overflow_mass += std::max(0.0, 1.0 - covered);
    return o;
}

// Time-average occupation law binned the same way.
inline BinnedOracle time_average_oracle(const DiscreteUniformSpec& spec,
                                        std::int64_t tau,
                                        const LogHistogram& hist) {
    BinnedOracle o;
    o.bin_mass.assign(hist.bins(), 0.0);
    for (std::int64_t m = 0; m <= tau; ++m) {
        const double p = time_average_occupation(m, tau, spec.r);
        const double y = static_cast<double>(m) * std::log(spec.mu);
        const double pos = (y - hist.y_lo()) / hist.dy();
        if (pos < 0.0)
            o.underflow_mass += p;
        else if (static_cast<std::size_t>(pos) >= hist.bins())
            o.overflow_mass += p;
        else
            o.bin_mass[static_cast<std::size_t>(pos)] += p;
    }
    return o;
}

namespace detail {

// Mass of the transient solution of the uniform continuous process on
// [a, b] in x, exact given the initial CDF.
inline double transient_mass(const ContinuousUniformSpec& spec, double a,
                             double b, double t) {
    if (b <= a) return 0.0;
    const double edge = std::exp(spec.lambda * t);
    double mass = 0.0;
    // Power-law part on [a, b] intersect [1, edge).
    const double p_lo = std::max(a, 1.0), p_hi = std::min(b, edge);
    if (p_hi > p_lo) {
        const double e = spec.q / spec.lambda;
        mass += std::pow(p_lo, -e) - std::pow(p_hi, -e);
    }
    // Initial-condition part on [a, b] intersect [edge, inf).
    const double i_lo = std::max(a, edge), i_hi = std::max(b, edge);
    if (i_hi > i_lo) {
        const double shift = std::exp(-spec.lambda * t);
        mass += std::exp(-spec.q * t) *
                (spec.f0_cdf(i_hi * shift) - spec.f0_cdf(i_lo * shift));
    }
    return mass;
}

}  // namespace detail

inline BinnedOracle transient_oracle(const ContinuousUniformSpec& spec, double t,
                                     const LogHistogram& hist) {
    BinnedOracle o;
    o.bin_mass.resize(hist.bins());
    const double x_lo = std::exp(hist.y_lo());
    const double x_hi = std::exp(hist.bin_left(hist.bins()));
    o.underflow_mass = detail::transient_mass(spec, 0.0, x_lo, t);
    o.overflow_mass = 1.0 - detail::transient_mass(spec, 0.0, x_hi, t);
    for (std::size_t i = 0; i < hist.bins(); ++i)
        o.bin_mass[i] = detail::transient_mass(spec, std::exp(hist.bin_left(i)),
                                               std::exp(hist.bin_left(i + 1)), t);
    return o;
}

inline BinnedOracle weibull_oracle(const AlgebraicFamily& fam,
                                   const LogHistogram& hist) {
    BinnedOracle o;
    o.bin_mass.resize(hist.bins());
    const auto surv = [&](double y) {
        return weibull_family_survival(fam, std::exp(y));
    };
    o.underflow_mass = 1.0 - surv(hist.y_lo());
    o.overflow_mass = surv(hist.bin_left(hist.bins()));
    for (std::size_t i = 0; i < hist.bins(); ++i)
        o.bin_mass[i] = surv(hist.bin_left(i)) - surv(hist.bin_left(i + 1));
    return o;
}

// Hill tail-index estimator over the top fraction of the per-bin masses.
// Diagnostic only: the heavy-tail literature (and this model family in
// particular) shows such estimators are unreliable near gamma_c.
inline double hill_tail_index(std::vector<double> samples,
                              double top_fraction = 0.01) {
    std::sort(samples.begin(), samples.end());
    const std::size_t k = std::max<std::size_t>(
        2, static_cast<std::size_t>(top_fraction * samples.size()));
    if (samples.size() < k + 1) return std::numeric_limits<double>::quiet_NaN();
    const double x_k = samples[samples.size() - k - 1];
    double acc = 0.0;
    for (std::size_t i = samples.size() - k; i < samples.size(); ++i)
        acc += std::log(samples[i] / x_k);
    return static_cast<double>(k) / acc;
}

}  // namespace smp
