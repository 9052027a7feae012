#pragma once

// Parameter laws for multipliers mu and reset values s, together with their
// log-axis counterparts (nu = ln mu, u = ln s). Each variant supports exact
// sampling, gamma-order moments <v^gamma>, and the characteristic function
// of the log variable.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "smp/random.hpp"

namespace smp {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct PointMass {
    double value;
};

// Mass a at mu0, mass 1-a at 1/mu0, with mu0 > 1.
struct TwoDelta {
    double a;
    double mu0;
};

// Density proportional to 1/v on [lo, hi] (uniform in ln v).
struct LogUniform {
    double lo;
    double hi;
};

struct LogNormalLaw {
    double mean_log;
    double sd_log;
};

struct Atom {
    double value;
    double weight;
};

struct EmpiricalAtoms {
    std::vector<Atom> atoms;
};

class ParamLaw {
public:
    using Variant =
        std::variant<PointMass, TwoDelta, LogUniform, LogNormalLaw, EmpiricalAtoms>;

    ParamLaw(PointMass p) : v_(p) {
        if (!(p.value > 0.0))
            throw std::invalid_argument("PointMass value must be positive");
    }
    ParamLaw(TwoDelta t) : v_(t) {
        if (!(t.a >= 0.0 && t.a <= 1.0))
            throw std::invalid_argument("TwoDelta a must be a probability");
        if (!(t.mu0 > 1.0))
            throw std::invalid_argument("TwoDelta mu0 must exceed 1");
    }
    ParamLaw(LogUniform u) : v_(u) {
        if (!(u.lo > 0.0 && u.hi > u.lo))
            throw std::invalid_argument("LogUniform requires 0 < lo < hi");
    }
    ParamLaw(LogNormalLaw n) : v_(n) {
        if (!(n.sd_log > 0.0))
            throw std::invalid_argument("LogNormal sd_log must be positive");
        if (!std::isfinite(n.mean_log))
            throw std::invalid_argument("LogNormal mean_log must be finite");
    }
    ParamLaw(EmpiricalAtoms e) : v_(std::move(e)) {
        auto& atoms = std::get<EmpiricalAtoms>(v_).atoms;
        if (atoms.empty())
            throw std::invalid_argument("EmpiricalAtoms needs at least one atom");
        double sum = 0.0;
        for (const Atom& a : atoms) {
            if (!(a.value > 0.0))
                throw std::invalid_argument("atom values must be strictly positive");
            if (!(a.weight >= 0.0))
                throw std::invalid_argument("atom weights must be nonnegative");
            sum += a.weight;
        }
        // Weights off by <= 1e-9 are rescaled, larger discrepancies rejected.
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("atom weights must sum to 1 (got " +
                                        std::to_string(sum) + ")");
        for (Atom& a : atoms) a.weight /= sum;
        cum_.reserve(atoms.size());
        double c = 0.0;
        for (const Atom& a : atoms) {
            c += a.weight;
            cum_.push_back(c);
        }
        cum_.back() = 1.0;
    }

    const Variant& variant() const { return v_; }

    bool is_atomic() const {
        return !std::holds_alternative<LogUniform>(v_) &&
               !std::holds_alternative<LogNormalLaw>(v_);
    }

    // Atoms as (ln value, weight); only for atomic variants.
    std::vector<std::pair<double, double>> log_atoms() const {
        std::vector<std::pair<double, double>> out;
        if (const auto* p = std::get_if<PointMass>(&v_)) {
            out.emplace_back(std::log(p->value), 1.0);
        } else if (const auto* t = std::get_if<TwoDelta>(&v_)) {
            const double l = std::log(t->mu0);
            out.emplace_back(l, t->a);
            out.emplace_back(-l, 1.0 - t->a);
        } else if (const auto* e = std::get_if<EmpiricalAtoms>(&v_)) {
            for (const Atom& a : e->atoms)
                out.emplace_back(std::log(a.value), a.weight);
        } else {
            throw std::logic_error("log_atoms on a continuous law");
        }
        return out;
    }

    double sample(RandomStream& rng) const { return std::exp(sample_log(rng)); }

    // Draw of the log variable; exact per variant.
    double sample_log(RandomStream& rng) const {
        if (const auto* p = std::get_if<PointMass>(&v_)) {
            return std::log(p->value);
        }
        if (const auto* t = std::get_if<TwoDelta>(&v_)) {
            const double l = std::log(t->mu0);
            return rng.uniform() < t->a ? l : -l;
        }
        if (const auto* u = std::get_if<LogUniform>(&v_)) {
            const double a = std::log(u->lo), b = std::log(u->hi);
            return a + (b - a) * rng.uniform();
        }
        if (const auto* n = std::get_if<LogNormalLaw>(&v_)) {
            return n->mean_log + n->sd_log * rng.normal();
        }
        const auto& e = std::get<EmpiricalAtoms>(v_);
        const double u = rng.uniform();
        const std::size_t i =
            std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin();
        return std::log(e.atoms[std::min(i, e.atoms.size() - 1)].value);
    }

    // <v^gamma>; finite for every gamma for all supported variants.
    double moment(double gamma) const { return std::exp(log_moment(gamma)); }

    // ln <v^gamma>, computed without overflow for large |gamma|.
    double log_moment(double gamma) const {
        if (const auto* p = std::get_if<PointMass>(&v_)) {
            return gamma * std::log(p->value);
        }
        if (std::get_if<TwoDelta>(&v_) || std::get_if<EmpiricalAtoms>(&v_)) {
            const auto atoms = log_atoms();
            double mx = -std::numeric_limits<double>::infinity();
            for (const auto& [lv, w] : atoms)
                if (w > 0.0) mx = std::max(mx, gamma * lv);
            double s = 0.0;
            for (const auto& [lv, w] : atoms)
                if (w > 0.0) s += w * std::exp(gamma * lv - mx);
            return mx + std::log(s);
        }
        if (const auto* u = std::get_if<LogUniform>(&v_)) {
            // <v^g> = (hi^g - lo^g) / (g (ln hi - ln lo))
            const double a = std::log(u->lo), b = std::log(u->hi);
            const double span = b - a;
            if (gamma == 0.0) return 0.0;
            const double g = std::abs(gamma) * span;
            const double top = std::max(gamma * a, gamma * b);
            return top + std::log(-std::expm1(-g)) - std::log(g);
        }
        const auto& n = std::get<LogNormalLaw>(v_);
        return gamma * n.mean_log + 0.5 * gamma * gamma * n.sd_log * n.sd_log;
    }

    // Fourier transform of the log-variable density:
    //   int exp(-2 pi i eta y) law(y) dy, with |result| <= 1 for real eta.
    std::complex<double> log_char(std::complex<double> eta) const {
        const std::complex<double> i2pi(0.0, -kTwoPi);
        if (std::get_if<PointMass>(&v_) || std::get_if<TwoDelta>(&v_) ||
            std::get_if<EmpiricalAtoms>(&v_)) {
            std::complex<double> s = 0.0;
            for (const auto& [lv, w] : log_atoms())
                s += w * std::exp(i2pi * eta * lv);
            return s;
        }
        if (const auto* u = std::get_if<LogUniform>(&v_)) {
            const double a = std::log(u->lo), b = std::log(u->hi);
            if (eta == std::complex<double>(0.0, 0.0)) return 1.0;
            const std::complex<double> k = i2pi * eta;
            return (std::exp(k * b) - std::exp(k * a)) / (k * (b - a));
        }
        const auto& n = std::get<LogNormalLaw>(v_);
        const std::complex<double> e2 = eta * eta;
        return std::exp(i2pi * eta * n.mean_log -
                        0.5 * kTwoPi * kTwoPi * e2 * n.sd_log * n.sd_log);
    }

    std::complex<double> log_char(double eta) const {
        return log_char(std::complex<double>(eta, 0.0));
    }

private:
    Variant v_;
    std::vector<double> cum_;  // cumulative weights for EmpiricalAtoms
};

}  // namespace smp
