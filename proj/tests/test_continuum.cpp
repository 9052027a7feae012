#include <cmath>

#include <doctest.h>

#include "smp/continuum.hpp"

using namespace smp;

TEST_CASE("transient density stays normalized") {
    const ContinuousUniformSpec spec(1.0, 1.0);
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (double t : {0.0, 0.5, 2.0, 5.0}) {
        // The density has a jump at the front x = e^{lambda t}; integrate
        // each smooth piece separately.
        const double front = std::exp(spec.lambda * t);
        double mass = 0.0;
        if (t > 0.0)
            mass += integrator.integrate(
                [&](double x) { return transient_density(spec, x, t); }, 1.0,
                front, 1e-9);
        mass += integrator.integrate(
            [&](double u) {
                if (!(u > 0.0)) return 0.0;
                const double v =
                    transient_density(spec, front / u, t) * front / (u * u);
                return std::isfinite(v) ? v : 0.0;
            },
            0.0, 1.0, 1e-9);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("transient density boundary value is q / lambda") {
    for (double lam : {0.5, 1.0, 2.0}) {
        for (double q : {0.3, 1.0, 4.0}) {
            const ContinuousUniformSpec spec(lam, q);
            CHECK(transient_density(spec, 1.0 + 1e-12, 0.1) ==
                  doctest::Approx(q / lam).epsilon(1e-9));
        }
    }
}

TEST_CASE("transient density: power law below the front, damped initial above") {
    const ContinuousUniformSpec spec(1.0, 1.0);
    const double t = 2.0;
    const double front = std::exp(t);
    // Below the moving front: q/lambda x^{-1-q/lambda}.
    for (double x : {1.5, 3.0, front * 0.99}) {
        CHECK(transient_density(spec, x, t) ==
              doctest::Approx(std::pow(x, -2.0)).epsilon(1e-12));
    }
    // Above: e^{-(lambda+q)t} f0(x e^{-lambda t}).
    for (double x : {front * 1.01, front * 2.0}) {
        const double want =
            std::exp(-2.0 * t) * std::exp(1.0 - x * std::exp(-t));
        CHECK(transient_density(spec, x, t) ==
              doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("transient density converges pointwise to the stationary power law") {
    const ContinuousUniformSpec spec(1.0, 1.0);
    for (double x : {1.2, 5.0, 40.0}) {
        CHECK(transient_density(spec, x, 30.0) ==
              doctest::Approx(stationary_density_uniform(spec, x))
                  .epsilon(1e-12));
    }
    CHECK(stationary_density_uniform(spec, 7.0) ==
          doctest::Approx(std::pow(7.0, -2.0)).epsilon(1e-14));
}

TEST_CASE("custom initial conditions are checked for normalization") {
    CHECK_THROWS_AS(
        ContinuousUniformSpec(1.0, 1.0,
                              [](double x) { return x >= 1.0 ? 2.0 * std::exp(1.0 - x) : 0.0; },
                              [](double x) { return x >= 1.0 ? -2.0 * std::expm1(1.0 - x) : 0.0; },
                              [](double u) { return 1.0 - std::log1p(-u / 2.0); }),
        std::invalid_argument);
    CHECK_THROWS_AS(ContinuousUniformSpec(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ContinuousUniformSpec(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("hazard exponent closed forms for the algebraic family") {
    const StateDependentSpec exp_growth(AlgebraicFamily{2.0, 0.0, 3.0});
    CHECK(hazard_exponent(exp_growth, 5.0) ==
          doctest::Approx(1.5 * std::log(5.0)).epsilon(1e-13));

    const StateDependentSpec linear(AlgebraicFamily{2.0, 1.0, 3.0});
    CHECK(hazard_exponent(linear, 5.0) ==
          doctest::Approx(3.0 * 4.0 / 2.0).epsilon(1e-13));

    // Generic spec falls back to quadrature; must agree with the closed form.
    const StateDependentSpec generic(
        [](double x) { return 2.0 * std::pow(x, 0.5); },
        [](double) { return 3.0; });
    const StateDependentSpec family_half(AlgebraicFamily{2.0, 0.5, 3.0});
    CHECK(hazard_exponent(generic, 9.0) ==
          doctest::Approx(hazard_exponent(family_half, 9.0)).epsilon(1e-8));
}

TEST_CASE("no-leak criterion: algebraic family never leaks") {
    for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
        const NoLeakResult res =
            check_no_leak(StateDependentSpec(AlgebraicFamily{1.0, alpha, 1.0}));
        CHECK(res.no_leak);
        CHECK_FALSE(res.heuristic);
    }
}

TEST_CASE("no-leak criterion flags super-exponential growth") {
    // lambda(x) = x^3 makes q/lambda integrable: trajectories escape.
    const StateDependentSpec leaky([](double x) { return x * x * x; },
                                   [](double) { return 1.0; });
    const NoLeakResult res = check_no_leak(leaky);
    CHECK_FALSE(res.no_leak);
    CHECK(res.heuristic);
    CHECK_THROWS_AS(stationary_normalization(leaky), std::domain_error);
}

TEST_CASE("stationary normalization of the algebraic family equals q") {
    for (double alpha : {0.5, 1.0, 2.0}) {
        const StateDependentSpec spec(AlgebraicFamily{1.5, alpha, 0.8});
        CHECK(stationary_normalization(spec) == 0.8);
        // Self-consistency: the density integrates to one.
        const double mass = detail::integrate_one_inf(
            [&](double x) { return stationary_density_general(spec, x, 0.8); });
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("stretched-exponential family: alpha = 1 is a pure exponential") {
    const AlgebraicFamily fam{1.0, 1.0, 1.0};
    const StateDependentSpec spec(fam);
    for (double x : {1.0, 2.0, 5.0, 12.0}) {
        CHECK(stationary_density_general(spec, x) ==
              doctest::Approx(std::exp(-(x - 1.0))).epsilon(1e-10));
        CHECK(weibull_family_survival(fam, x) ==
              doctest::Approx(std::exp(-(std::max(x, 1.0) - 1.0))).epsilon(1e-12));
    }
}

TEST_CASE("stretched-exponential family: alpha = 0 recovers the power law") {
    const AlgebraicFamily fam{1.0, 0.0, 2.0};
    CHECK(weibull_family_survival(fam, 10.0) ==
          doctest::Approx(std::pow(10.0, -2.0)).epsilon(1e-13));
    const StateDependentSpec spec(fam);
    CHECK(stationary_density_general(spec, 10.0) ==
          doctest::Approx(2.0 * std::pow(10.0, -3.0)).epsilon(1e-12));
}

TEST_CASE("survival function is the integral of the stationary density") {
    for (double alpha : {0.5, 2.0}) {
        const AlgebraicFamily fam{1.0, alpha, 1.0};
        const StateDependentSpec spec(fam);
        for (double x : {1.5, 3.0, 8.0}) {
            // d/dx survival = -f_inf.
            const double h = 1e-6 * x;
            const double deriv = (weibull_family_survival(fam, x + h) -
                                  weibull_family_survival(fam, x - h)) /
                                 (2.0 * h);
            CHECK(-deriv ==
                  doctest::Approx(stationary_density_general(spec, x, fam.q))
                      .epsilon(1e-6));
        }
    }
}

TEST_CASE("reset flux self-consistency: integral of q f_inf equals Phi_inf") {
    const StateDependentSpec spec(AlgebraicFamily{1.0, 1.0, 1.0});
    const double flux = detail::integrate_one_inf([&](double x) {
        return spec.q_fn(x) * stationary_density_general(spec, x, 1.0);
    });
    CHECK(flux == doctest::Approx(1.0).epsilon(1e-6));
}
