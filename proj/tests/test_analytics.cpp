#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "smp/analytics.hpp"
#include "smp/random.hpp"

using namespace smp;

namespace {

// Independent occupation oracle: evolve the full probability vector by the
// Chapman-Kolmogorov step p'_0 = r, p'_{m+1} = (1-r) p_m.
std::vector<double> evolve_occupation(double r, std::int64_t t) {
    std::vector<double> p{1.0};
    for (std::int64_t s = 0; s < t; ++s) {
        std::vector<double> next(p.size() + 1, 0.0);
        for (std::size_t m = 0; m < p.size(); ++m) {
            next[0] += r * p[m];
            next[m + 1] = (1.0 - r) * p[m];
        }
        p = std::move(next);
    }
    return p;
}

}  // namespace

TEST_CASE("occupation law: closed form equals the evolved probability vector") {
    const DiscreteUniformSpec spec(1.1, 0.1);
    for (std::int64_t t : {0, 1, 2, 5, 17, 30}) {
        const std::vector<double> p = evolve_occupation(spec.r, t);
        double total = 0.0;
        for (std::int64_t m = 0; m <= t; ++m) {
            const double v = occupation_probability(spec, m, t);
            CHECK(v == doctest::Approx(p[static_cast<std::size_t>(m)])
                           .epsilon(1e-13));
            total += v;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(occupation_probability(spec, t + 1, t) == 0.0);
    }
}

TEST_CASE("occupation law approaches the geometric stationary law") {
    const DiscreteUniformSpec spec(1.3, 0.25);
    for (std::int64_t m = 0; m <= 20; ++m) {
        const double stat = occupation_probability(spec, m, kStationary);
        CHECK(stat == doctest::Approx(0.25 * std::pow(0.75, double(m)))
                          .epsilon(1e-14));
        CHECK(occupation_probability(spec, m, 200) ==
              doctest::Approx(stat).epsilon(1e-12));
    }
}

TEST_CASE("critical exponent solves (1-r) mu^gamma = 1") {
    for (double mu : {1.05, 1.1, 2.0, 10.0}) {
        for (double r : {0.01, 0.1, 0.5, 0.9}) {
            const double gc = critical_exponent(mu, r);
            CHECK(std::log1p(-r) + gc * std::log(mu) ==
                  doctest::Approx(0.0).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(critical_exponent(0.9, 0.1), std::invalid_argument);
}

TEST_CASE("stationary power law carries the geometric masses at the lattice") {
    const DiscreteUniformSpec spec(1.1, 0.1);
    const double lnmu = std::log(spec.mu);
    for (std::int64_t m = 0; m <= 60; ++m) {
        const double x = std::exp(lnmu * static_cast<double>(m));
        // f(x) x ln mu = r x^{-gamma_c} = r (1-r)^m exactly on the lattice.
        CHECK(stationary_density(spec, x) * x * lnmu ==
              doctest::Approx(spec.r * std::pow(0.9, double(m))).epsilon(1e-10));
    }
}

TEST_CASE("moments: closed form equals the occupation-weighted sum") {
    const DiscreteUniformSpec spec(1.1, 0.3);
    for (double g : {-1.0, 0.5, 1.0, 2.0, 7.0}) {
        for (std::int64_t t : {0, 1, 3, 10, 25}) {
            double direct = 0.0;
            for (std::int64_t m = 0; m <= t; ++m)
                direct += std::pow(spec.mu, g * static_cast<double>(m)) *
                          occupation_probability(spec, m, t);
            CHECK(moment(spec, g, t).value ==
                  doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("moment convergence criterion and stationary value") {
    const DiscreteUniformSpec spec(1.1, 0.1);
    const MomentValue first = moment(spec, 1.0, kStationary);
    CHECK(first.convergent);
    CHECK(first.value == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(first.timescale() ==
          doctest::Approx(1.0 / std::abs(std::log(0.9 * 1.1))).epsilon(1e-12));

    const double gc = critical_exponent(1.1, 0.1);
    CHECK(moment(spec, gc - 0.01, kStationary).convergent);
    const MomentValue beyond = moment(spec, gc + 0.01, kStationary);
    CHECK_FALSE(beyond.convergent);
    CHECK(beyond.value == kInf);
    // Finite-time moments stay finite even in the divergent regime.
    CHECK(std::isfinite(moment(spec, gc + 1.0, 50).value));
}

TEST_CASE("moment recursion handles the marginal case (1-r) mu^gamma = 1") {
    const DiscreteUniformSpec spec(1.1, 0.1);
    const double gc = critical_exponent(1.1, 0.1);
    const MomentValue at = moment(spec, gc, 100);
    // At the critical order the moment grows linearly: <x^gc>_t = 1 + r t.
    CHECK(at.value == doctest::Approx(1.0 + 0.1 * 100.0).epsilon(1e-7));
}

TEST_CASE("general moment reduces to the uniform model for delta laws") {
    const DiscreteUniformSpec uni(1.2, 0.2);
    const DiscreteRandomSpec gen(ParamLaw(PointMass{1.2}),
                                 ParamLaw(PointMass{1.0}), 0.2);
    RandomStream rng(5, 0);
    for (int i = 0; i < 100; ++i) {
        const double g = (rng.uniform() - 0.5) * 8.0;
        const std::int64_t t = static_cast<std::int64_t>(rng.uniform() * 200.0);
        const MomentValue a = moment(uni, g, t);
        const MomentValue b = general_moment(gen, g, t);
        CHECK(b.value == doctest::Approx(a.value).epsilon(1e-12));
        CHECK(a.convergent == b.convergent);
    }
}

TEST_CASE("general moment with random reset values") {
    // <x^g>_inf = r <s^g> / (1 - (1-r) <mu^g>).
    const ParamLaw mult(LogUniform{1.0, 1.3});
    const ParamLaw reset(LogUniform{0.5, 2.0});
    const DiscreteRandomSpec spec(mult, reset, 0.25);
    const double g = 1.0;
    const double want =
        0.25 * reset.moment(g) / (1.0 - 0.75 * mult.moment(g));
    CHECK(general_moment(spec, g, kStationary).value ==
          doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("cumulative average mean against brute-force moment summation") {
    const DiscreteUniformSpec spec(1.1, 0.3);
    for (std::int64_t t : {0, 1, 5, 40, 200}) {
        double sum = 0.0;
        for (std::int64_t s = 0; s <= t; ++s) sum += moment(spec, 1.0, s).value;
        CHECK(cumulative_average_mean(spec, t) ==
              doctest::Approx(sum / static_cast<double>(t + 1)).epsilon(1e-12));
    }
}

TEST_CASE("cumulative average mean: large-time limit is the stationary mean") {
    const DiscreteUniformSpec spec(1.1, 0.3);
    const double stat = moment(spec, 1.0, kStationary).value;
    CHECK(cumulative_average_mean(spec, 2000000) ==
          doctest::Approx(stat).epsilon(1e-5));
}

TEST_CASE("first-passage statistics against a linear-system oracle") {
    // E_m = 1 + r E_0 + (1-r) E_{m+1}, E_M = 0; solve by back substitution
    // treating E_0 as unknown: E_m = a_m + b_m E_0.
    for (std::int64_t M : {1, 3, 5, 10, 20}) {
        for (double r : {0.05, 0.1, 0.4}) {
            std::vector<double> a(M + 1, 0.0), b(M + 1, 0.0);
            for (std::int64_t m = M - 1; m >= 0; --m) {
                a[m] = 1.0 + (1.0 - r) * a[m + 1];
                b[m] = r + (1.0 - r) * b[m + 1];
            }
            const double e0 = a[0] / (1.0 - b[0]);
            const PassageStatistics ps = passage_statistics(M, r);
            CHECK(ps.mean_wait == doctest::Approx(e0).epsilon(1e-10));
            // Ratio identity w/d = (1 - (1-r)^M) / r^2.
            CHECK(ps.ratio == doctest::Approx(ps.mean_wait / ps.mean_draws)
                                  .epsilon(1e-12));
        }
    }
}

TEST_CASE("convergence interval endpoints satisfy the fixed-point criterion") {
    const std::vector<ParamLaw> laws = {
        ParamLaw(TwoDelta{0.5, std::exp(1.0)}),
        ParamLaw(LogUniform{0.5, 3.0}),
        ParamLaw(LogNormalLaw{0.05, 0.5}),
        ParamLaw(EmpiricalAtoms{{{0.5, 0.3}, {1.2, 0.4}, {2.0, 0.3}}})};
    for (const ParamLaw& law : laws) {
        const ConvergenceInterval ci = convergence_interval(law, 0.1);
        for (double g : {ci.gamma_minus, ci.gamma_plus}) {
            if (!std::isfinite(g)) continue;
            CHECK(std::log1p(-0.1) + law.log_moment(g) ==
                  doctest::Approx(0.0).epsilon(1e-9));
        }
        CHECK(ci.gamma_minus < 0.0);
        CHECK(ci.gamma_plus > 0.0);
    }
}

TEST_CASE("two-delta interval: closed form, antisymmetry, and limits") {
    const double r = 0.1;
    const double mu0 = std::exp(1.0);

    // Symmetric law: the interval is antisymmetric about zero.
    const ConvergenceInterval sym = two_delta_interval(0.5, mu0, r);
    CHECK(sym.gamma_plus + sym.gamma_minus == doctest::Approx(0.0).epsilon(1e-12));

    // Closed form equals the numeric root everywhere in (0,1).
    for (double a : {0.05, 0.3, 0.5, 0.8, 0.99}) {
        const ConvergenceInterval cf = two_delta_interval(a, mu0, r);
        const ConvergenceInterval num =
            convergence_interval_numeric(ParamLaw(TwoDelta{a, mu0}), r);
        CHECK(num.gamma_plus == doctest::Approx(cf.gamma_plus).epsilon(1e-9));
        CHECK(num.gamma_minus == doctest::Approx(cf.gamma_minus).epsilon(1e-9));
    }

    // a -> 1 recovers the deterministic critical exponent.
    const ConvergenceInterval one = two_delta_interval(1.0, mu0, r);
    CHECK(one.gamma_plus ==
          doctest::Approx(critical_exponent(mu0, r)).epsilon(1e-12));
    CHECK(one.gamma_minus == -kInf);
}

TEST_CASE("point-mass interval matches the critical exponent") {
    const ConvergenceInterval ci =
        convergence_interval(ParamLaw(PointMass{1.1}), 0.1);
    CHECK(ci.gamma_plus == doctest::Approx(critical_exponent(1.1, 0.1)).epsilon(1e-12));
    CHECK(ci.gamma_minus == -kInf);
}

TEST_CASE("Fourier-domain solution interpolates the moments") {
    const DiscreteRandomSpec spec(ParamLaw(LogUniform{0.9, 1.4}),
                                  ParamLaw(LogNormalLaw{0.0, 0.3}), 0.2,
                                  ParamLaw(PointMass{2.0}));
    RandomStream rng(11, 0);
    for (int i = 0; i < 100; ++i) {
        const double g = (rng.uniform() - 0.5) * 4.0;
        const std::int64_t t = static_cast<std::int64_t>(rng.uniform() * 50.0);
        const std::complex<double> eta(0.0, g / kTwoPi);
        const std::complex<double> ghat = log_char_solution(spec, eta, t);
        const MomentValue mv = general_moment(spec, g, t);
        CHECK(ghat.real() == doctest::Approx(mv.value).epsilon(1e-10));
        CHECK(std::abs(ghat.imag()) <= 1e-10 * std::abs(ghat.real()));
    }
    // Stationary limit too, inside the convergence interval.
    const std::complex<double> eta(0.0, 0.8 / kTwoPi);
    CHECK(log_char_solution(spec, eta, kStationary).real() ==
          doctest::Approx(general_moment(spec, 0.8, kStationary).value)
              .epsilon(1e-10));
}

TEST_CASE("grid inversion recovers the geometric lattice masses") {
    const double mu = 1.5, r = 0.2;
    const DiscreteRandomSpec spec(ParamLaw(PointMass{mu}),
                                  ParamLaw(PointMass{1.0}), r);
    const double lnmu = std::log(mu);
    const std::size_t n = 1 << 12;
    const GridDensity grid = stationary_log_density_grid(
        spec, -0.5 * lnmu, (static_cast<double>(n) / 8.0 - 0.5) * lnmu, n);
    // Lattice points y = m ln mu land on grid indices 8 m + 4.
    for (std::int64_t m = 0; m <= 20; ++m) {
        const std::size_t j = static_cast<std::size_t>(8 * m + 4);
        CHECK(grid.density[j] * grid.dy ==
              doctest::Approx(r * std::pow(1.0 - r, double(m))).epsilon(1e-6));
    }
    CHECK_FALSE(grid.alias_warning);
}

TEST_CASE("grid inversion integrates a continuous law to unit mass") {
    const DiscreteRandomSpec spec(ParamLaw(LogNormalLaw{0.05, 0.3}),
                                  ParamLaw(LogNormalLaw{0.0, 0.2}), 0.3);
    const GridDensity grid = stationary_log_density_grid(spec, -8.0, 12.0, 1 << 12);
    double mass = 0.0;
    for (double d : grid.density) mass += d * grid.dy;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    for (double d : grid.density) CHECK(d > -1e-9);
}
