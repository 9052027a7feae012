#pragma once

// Closed-form results for the discrete-time processes: occupation
// probabilities, moments of any order, cumulative averages, first-passage
// statistics, the Fourier-domain solution of the log-variable chain, and
// moment-convergence intervals.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "smp/laws.hpp"

namespace smp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Horizon: a nonnegative time index, or infinity (nullopt).
using Time = std::optional<std::int64_t>;
inline constexpr Time kStationary = std::nullopt;

struct DiscreteUniformSpec {
    double mu;  // multiplier, > 0 and != 1
    double r;   // reset probability in (0,1)

    DiscreteUniformSpec(double mu_, double r_) : mu(mu_), r(r_) {
        if (!(mu > 0.0) || mu == 1.0)
            throw std::invalid_argument("mu must be positive and != 1");
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("r must lie in (0,1)");
    }
};

struct DiscreteRandomSpec {
    ParamLaw multiplier_law;  // P(mu)
    ParamLaw reset_law;       // F(s)
    double r;                 // reset probability in (0,1)
    ParamLaw initial_law;     // f0

    DiscreteRandomSpec(ParamLaw mult, ParamLaw reset, double r_,
                       ParamLaw initial = ParamLaw(PointMass{1.0}))
        : multiplier_law(std::move(mult)),
          reset_law(std::move(reset)),
          r(r_),
          initial_law(std::move(initial)) {
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("r must lie in (0,1)");
    }
};

// Moment value together with its convergence status. `rate` is
// ln[(1-r)<mu^gamma>]: negative means exponential convergence towards the
// stationary value on timescale 1/|rate|, nonnegative means divergence.
struct MomentValue {
    double value;
    bool convergent;
    double rate;

    double timescale() const { return 1.0 / std::abs(rate); }
};

struct MomentSeries {
    double gamma;
    std::vector<std::int64_t> times;
    std::vector<double> values;
    bool convergent;
    double stationary_value;     // +inf when divergent
    bool variance_defined;       // second moment of x^gamma converges
};

// p_t^(m): probability that x_t = mu^m. Default initial condition is
// delta_{m0}; a generic p0 may be supplied as a normalized vector.
inline double occupation_probability(const DiscreteUniformSpec& spec,
                                     std::int64_t m, Time t,
                                     const std::vector<double>* p0 = nullptr) {
    if (m < 0) throw std::invalid_argument("m must be nonnegative");
    const double r = spec.r;
    if (p0) {
        double sum = 0.0;
        for (double p : *p0) sum += p;
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("initial occupation vector not normalized");
    }
    if (!t) return r * std::pow(1.0 - r, static_cast<double>(m));
    const std::int64_t tv = *t;
    if (tv < 0) throw std::invalid_argument("t must be nonnegative");
    if (m < tv) return r * std::pow(1.0 - r, static_cast<double>(m));
    const double decay = std::pow(1.0 - r, static_cast<double>(tv));
    if (!p0) return m == tv ? decay : 0.0;
    const std::size_t k = static_cast<std::size_t>(m - tv);
    return k < p0->size() ? (*p0)[k] * decay : 0.0;
}

// gamma_c = |ln(1-r)/ln mu|, the tail exponent of the stationary density.
inline double critical_exponent(double mu, double r) {
    if (!(mu > 1.0)) throw std::invalid_argument("mu must exceed 1");
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    return std::abs(std::log1p(-r) / std::log(mu));
}

// Stationary density (r/ln mu) x^{-1-gamma_c} on [1, inf); mu > 1 only.
inline double stationary_density(const DiscreteUniformSpec& spec, double x) {
    if (!(spec.mu > 1.0))
        throw std::invalid_argument("power-law tail requires mu > 1");
    if (!(x >= 1.0)) throw std::invalid_argument("x must be >= 1");
    const double gc = critical_exponent(spec.mu, spec.r);
    return spec.r / std::log(spec.mu) * std::pow(x, -1.0 - gc);
}

namespace detail {

// Shared closed form for <x^gamma>_t with per-step factor phi and source
// r*<s^gamma>. Powers are taken in log space; the removable singularity at
// phi = 1 falls back to the direct recursion.
inline MomentValue moment_impl(double ln_phi, double source, double x0_moment,
                               Time t) {
    const bool convergent = ln_phi < 0.0;
    if (!t) {
        return {convergent ? source / (-std::expm1(ln_phi)) : kInf, convergent,
                ln_phi};
    }
    const std::int64_t tv = *t;
    if (tv < 0) throw std::invalid_argument("t must be nonnegative");
    if (std::abs(ln_phi) < 1e-9) {
        const double phi = std::exp(ln_phi);
        double v = x0_moment;
        for (std::int64_t i = 0; i < tv; ++i) v = phi * v + source;
        return {v, convergent, ln_phi};
    }
    const double denom = -std::expm1(ln_phi);  // 1 - phi
    const double stat = source / denom;
    const double value =
        stat + (x0_moment - stat) * std::exp(static_cast<double>(tv) * ln_phi);
    return {value, convergent, ln_phi};
}

}  // namespace detail

// <x^gamma>_t for the uniform process; t = kStationary gives the limit,
// which is finite iff (1-r) mu^gamma < 1.
inline MomentValue moment(const DiscreteUniformSpec& spec, double gamma, Time t,
                          double initial_moment = 1.0) {
    const double ln_phi = std::log1p(-spec.r) + gamma * std::log(spec.mu);
    return detail::moment_impl(ln_phi, spec.r, initial_moment, t);
}

// <x^gamma>_t for random multipliers and reset values; finite iff
// (1-r) <mu^gamma> < 1.
inline MomentValue general_moment(const DiscreteRandomSpec& spec, double gamma,
                                  Time t) {
    const double ln_phi = std::log1p(-spec.r) + spec.multiplier_law.log_moment(gamma);
    const double source = spec.r * spec.reset_law.moment(gamma);
    const double x0 = spec.initial_law.moment(gamma);
    return detail::moment_impl(ln_phi, source, x0, t);
}

// Expectation of the accumulated average xbar_t = (t+1)^{-1} sum x_tau.
inline double cumulative_average_mean(const DiscreteUniformSpec& spec,
                                      std::int64_t t) {
    if (t < 0) throw std::invalid_argument("t must be nonnegative");
    const double ln_phi = std::log1p(-spec.r) + std::log(spec.mu);
    if (std::abs(ln_phi) < 1e-9) {
        // Degenerate (1-r)mu = 1: average the recursion directly.
        const double phi = std::exp(ln_phi);
        double v = 1.0, sum = 1.0;
        for (std::int64_t i = 0; i < t; ++i) {
            v = phi * v + spec.r;
            sum += v;
        }
        return sum / static_cast<double>(t + 1);
    }
    const double denom = -std::expm1(ln_phi);  // 1 - (1-r)mu
    const double stat = spec.r / denom;
    const double pw = std::exp(static_cast<double>(t + 1) * ln_phi);
    return stat + (1.0 - stat) * (1.0 - pw) / (static_cast<double>(t + 1) * denom);
}

// Mean waiting time until x_t first reaches X = mu^M, mean number of draws
// from the stationary law until X appears (all earlier draws lower), and
// their ratio w/d = (1 - (1-r)^M) / r^2.
struct PassageStatistics {
    double mean_wait;    // w_X
    double mean_draws;   // d_X
    double ratio;        // w_X / d_X
};

inline PassageStatistics passage_statistics(std::int64_t M, double r) {
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    const double decay = std::pow(1.0 - r, static_cast<double>(M));
    const double w = (1.0 / r) * (1.0 / decay - 1.0);
    const double d = r / decay;
    return {w, d, (1.0 - decay) / (r * r)};
}

// Orders gamma for which the stationary moment is finite:
// (1-r) <mu^gamma> < 1 on (gamma_minus, gamma_plus), with +-inf when the
// criterion never binds on that side.
struct ConvergenceInterval {
    double gamma_minus;
    double gamma_plus;
};

namespace detail {

inline double interval_root(const ParamLaw& law, double r, double direction) {
    // psi(gamma) = ln(1-r) + ln<mu^gamma> is convex with psi(0) < 0, so
    // there is at most one root per side. Expanding bracket, then bisection.
    const auto psi = [&](double g) { return std::log1p(-r) + law.log_moment(g); };
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (double step = 1.0; std::abs(hi) < 512.0; hi += direction * step) {
        if (psi(hi) > 0.0) {
            found = true;
            break;
        }
        lo = hi;
    }
    if (!found) return direction * kInf;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (psi(mid) > 0.0 ? hi : lo) = mid;
        if (std::abs(hi - lo) < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Generic numeric root bracketing of (1-r)<mu^gamma> = 1.
inline ConvergenceInterval convergence_interval_numeric(const ParamLaw& law,
                                                        double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    return {detail::interval_root(law, r, -1.0),
            detail::interval_root(law, r, +1.0)};
}

// Closed form for the two-delta multiplier law.
inline ConvergenceInterval two_delta_interval(double a, double mu0, double r) {
    if (!(mu0 > 1.0)) throw std::invalid_argument("mu0 must exceed 1");
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
    const double l = std::log(mu0);
    if (a <= 0.0) {
        // All mass below 1: only negative orders can diverge.
        return {std::log((1.0 - r)) / l, kInf};
    }
    if (a >= 1.0) {
        return {-kInf, -std::log1p(-r) / l};
    }
    const double disc = 1.0 - 4.0 * a * (1.0 - a) * (1.0 - r) * (1.0 - r);
    const double s = std::sqrt(disc);
    const double den = 2.0 * a * (1.0 - r);
    return {std::log((1.0 - s) / den) / l, std::log((1.0 + s) / den) / l};
}

inline ConvergenceInterval convergence_interval(const ParamLaw& law, double r) {
    if (const auto* t = std::get_if<TwoDelta>(&law.variant()))
        return two_delta_interval(t->a, t->mu0, r);
    if (const auto* p = std::get_if<PointMass>(&law.variant())) {
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("r must lie in (0,1)");
        const double l = std::log(p->value);
        if (l == 0.0) return {-kInf, kInf};
        const double root = -std::log1p(-r) / l;
        return l > 0.0 ? ConvergenceInterval{-kInf, root}
                       : ConvergenceInterval{root, kInf};
    }
    return convergence_interval_numeric(law, r);
}

// Fourier-domain solution g_hat_t(eta) of the log-variable chain; the
// stationary limit is r G_hat / (1 - (1-r) Q_hat).
inline std::complex<double> log_char_solution(const DiscreteRandomSpec& spec,
                                              std::complex<double> eta, Time t) {
    const std::complex<double> Q = spec.multiplier_law.log_char(eta);
    const std::complex<double> G = spec.reset_law.log_char(eta);
    const std::complex<double> phi = (1.0 - spec.r) * Q;
    const std::complex<double> stat = spec.r * G / (1.0 - phi);
    if (!t) return stat;
    if (*t < 0) throw std::invalid_argument("t must be nonnegative");
    const std::complex<double> g0 = spec.initial_law.log_char(eta);
    return stat + (g0 - stat) * std::pow(phi, static_cast<double>(*t));
}

inline std::complex<double> log_char_solution(const DiscreteRandomSpec& spec,
                                              double eta, Time t) {
    return log_char_solution(spec, std::complex<double>(eta, 0.0), t);
}

// Numeric Fourier inversion of the stationary log-density on a uniform grid.
struct GridDensity {
    std::vector<double> y;        // grid points
    std::vector<double> density;  // g_inf samples (real part of the inversion)
    double dy;
    double eta_max;
    double alias_tail_bound;      // estimated mass outside [y_lo, y_hi)
    bool alias_warning;           // bound exceeds 1e-3
};

namespace detail {

// In-place radix-2 FFT, sign = -1 forward / +1 inverse (unscaled).
inline void fft(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const std::complex<double> w0(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w = 1.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= w0;
            }
        }
    }
}

// Markov bound on the stationary mass outside the y-window, optimized over
// moment orders inside the convergence interval.
inline double tail_mass_bound(const DiscreteRandomSpec& spec, double y_lo,
                              double y_hi) {
    const ConvergenceInterval ci =
        convergence_interval(spec.multiplier_law, spec.r);
    const auto side = [&](double g_edge, double y_edge, double sgn) {
        if (g_edge == 0.0) return 1.0;
        double best = 1.0;
        for (int i = 1; i <= 32; ++i) {
            const double g =
                sgn * std::min(std::abs(g_edge) * i / 33.0, 512.0 * i / 33.0);
            const MomentValue mv = general_moment(spec, g, kStationary);
            if (!mv.convergent) continue;
            best = std::min(best, mv.value * std::exp(-g * y_edge));
        }
        return best;
    };
    return side(ci.gamma_plus, y_hi, +1.0) + side(ci.gamma_minus, y_lo, -1.0);
}

}  // namespace detail

// Inverts g_hat_inf over eta in [-eta_max, eta_max) sampled at n points.
// With the default truncation eta_max = n / (2 (y_hi - y_lo)) the quadrature
// is the exact inverse DFT pairing, so lattice-supported laws are recovered
// without leakage (per-bin mass = density * dy).
inline GridDensity stationary_log_density_grid(const DiscreteRandomSpec& spec,
                                               double y_lo, double y_hi,
                                               std::size_t n = 1 << 14,
                                               double eta_max = 0.0) {
    if (!(y_hi > y_lo)) throw std::invalid_argument("empty y-window");
    if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
    const double width = y_hi - y_lo;
    const double dy = width / static_cast<double>(n);
    if (eta_max <= 0.0) eta_max = static_cast<double>(n) / (2.0 * width);
    const double deta = 2.0 * eta_max / static_cast<double>(n);

    GridDensity out;
    out.dy = dy;
    out.eta_max = eta_max;
    out.y.resize(n);
    out.density.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        out.y[j] = y_lo + dy * static_cast<double>(j);

    // g(y_j) = Re[ deta * sum_k ghat(eta_k) exp(2 pi i eta_k y_j) ],
    // eta_k = -eta_max + k*deta. Fold the constant phases into the spectrum
    // so the k-sum is a plain inverse DFT when deta*dy = 1/n.
    std::vector<std::complex<double>> spec_k(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double eta = -eta_max + deta * static_cast<double>(k);
        spec_k[k] = log_char_solution(spec, eta, kStationary) *
                    std::exp(std::complex<double>(0.0, kTwoPi * eta * y_lo));
    }
    const bool pow2 = (n & (n - 1)) == 0;
    const bool dft_pairing = std::abs(deta * dy * static_cast<double>(n) - 1.0) < 1e-12;
    std::vector<std::complex<double>> sums(n);
    if (pow2 && dft_pairing) {
        detail::fft(spec_k, +1);
        sums = std::move(spec_k);
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            std::complex<double> s = 0.0;
            const double yj = dy * static_cast<double>(j);
            for (std::size_t k = 0; k < n; ++k)
                s += spec_k[k] *
                     std::exp(std::complex<double>(0.0, kTwoPi * deta *
                                                            static_cast<double>(k) * yj));
            sums[j] = s;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double phase = -kTwoPi * eta_max * dy * static_cast<double>(j);
        const std::complex<double> rot(std::cos(phase), std::sin(phase));
        out.density[j] = deta * (sums[j] * rot).real();
    }

    out.alias_tail_bound = detail::tail_mass_bound(spec, y_lo, y_hi);
    out.alias_warning = out.alias_tail_bound > 1e-3;
    return out;
}

}  // namespace smp
