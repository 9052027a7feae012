// Command-line front end: analytic tables, Monte Carlo runs, burst
// combinatorics, first-passage experiments, and side-by-side
// simulation-vs-theory comparisons, all emitted as figure-ready CSV/JSON.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smp/analytics.hpp"
#include "smp/bursts.hpp"
#include "smp/compare.hpp"
#include "smp/continuum.hpp"
#include "smp/io.hpp"
#include "smp/montecarlo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitTolerance = 3;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_csv(const smp::RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(std::filesystem::path(cfg.out_dir) / name);
    if (!out) throw std::runtime_error("cannot open output file " + name);
    char line[96];
    std::snprintf(line, sizeof(line), "# config_hash=%016" PRIx64 " master_seed=%" PRIu64 "\n",
                  smp::config_hash(cfg), cfg.seed);
    out << line;
    return out;
}

bool wants(const smp::RunConfig& cfg, const std::string& product) {
    if (cfg.outputs.empty()) return true;  // no filter: emit everything
    for (const auto& p : cfg.outputs)
        if (p == product) return true;
    return false;
}

smp::DiscreteUniformSpec uniform_spec(const smp::RunConfig& cfg) {
    return smp::DiscreteUniformSpec(cfg.mu, cfg.r);
}

smp::DiscreteRandomSpec random_spec(const smp::RunConfig& cfg) {
    if (!cfg.multiplier_law || !cfg.reset_law)
        throw std::invalid_argument(
            "discrete_random needs multiplier_law and reset_law");
    return smp::DiscreteRandomSpec(
        *cfg.multiplier_law, *cfg.reset_law, cfg.r,
        cfg.initial_law ? *cfg.initial_law : smp::ParamLaw(smp::PointMass{1.0}));
}

void write_moments_analytic(const smp::RunConfig& cfg) {
    auto out = open_csv(cfg, "moments.csv");
    out << "t,gamma,exact_moment,convergent,stationary\n";
    const std::int64_t t_max = static_cast<std::int64_t>(cfg.horizon);
    const std::vector<double> gammas = cfg.gammas.empty()
                                           ? std::vector<double>{1.0}
                                           : cfg.gammas;
    for (double g : gammas) {
        smp::MomentValue stat{0, false, 0};
        auto at = [&](smp::Time t) {
            return cfg.model == "discrete_uniform"
                       ? smp::moment(uniform_spec(cfg), g, t)
                       : smp::general_moment(random_spec(cfg), g, t);
        };
        stat = at(smp::kStationary);
        for (std::int64_t t = 0; t <= t_max; ++t) {
            const smp::MomentValue mv = at(t);
            out << t << ',' << fmt(g) << ',' << fmt(mv.value) << ','
                << (mv.convergent ? 1 : 0) << ',' << fmt(stat.value) << '\n';
        }
    }
}

void write_occupation_analytic(const smp::RunConfig& cfg) {
    const smp::DiscreteUniformSpec spec = uniform_spec(cfg);
    const std::int64_t t = static_cast<std::int64_t>(cfg.horizon);
    auto out = open_csv(cfg, "occupation.csv");
    out << "m,p_t,p_stationary,time_average\n";
    for (std::int64_t m = 0; m <= t; ++m) {
        out << m << ',' << fmt(smp::occupation_probability(spec, m, t)) << ','
            << fmt(smp::occupation_probability(spec, m, smp::kStationary)) << ','
            << fmt(smp::time_average_occupation(m, t, spec.r)) << '\n';
    }
}

void write_stationary_continuous(const smp::RunConfig& cfg) {
    auto out = open_csv(cfg, "stationary.csv");
    out << "x,f_inf\n";
    for (double lx = 0.0; lx <= 8.0; lx += 0.02) {
        const double x = std::exp(lx);
        double f;
        if (cfg.model == "continuous_uniform") {
            f = smp::stationary_density_uniform(
                smp::ContinuousUniformSpec(cfg.lambda, cfg.q), x);
        } else {
            const smp::StateDependentSpec sd(
                smp::AlgebraicFamily{cfg.lambda0, cfg.alpha, cfg.q});
            f = smp::stationary_density_general(sd, x);
        }
        out << fmt(x) << ',' << fmt(f) << '\n';
    }
}

void write_interval_sweep(const smp::RunConfig& cfg, bool* failed) {
    const auto* td =
        cfg.multiplier_law
            ? std::get_if<smp::TwoDelta>(&cfg.multiplier_law->variant())
            : nullptr;
    if (!td)
        throw std::invalid_argument("interval sweep needs a two_delta multiplier law");
    auto out = open_csv(cfg, "interval.csv");
    out << "a,gamma_minus_closed,gamma_plus_closed,gamma_minus_numeric,"
           "gamma_plus_numeric\n";
    double worst = 0.0;
    for (int i = 1; i <= 49; ++i) {
        const double a = 0.02 * i;
        const auto closed = smp::two_delta_interval(a, td->mu0, cfg.r);
        const auto numeric = smp::convergence_interval_numeric(
            smp::ParamLaw(smp::TwoDelta{a, td->mu0}), cfg.r);
        out << fmt(a) << ',' << fmt(closed.gamma_minus) << ','
            << fmt(closed.gamma_plus) << ',' << fmt(numeric.gamma_minus) << ','
            << fmt(numeric.gamma_plus) << '\n';
        worst = std::max({worst,
                          std::abs(closed.gamma_minus - numeric.gamma_minus),
                          std::abs(closed.gamma_plus - numeric.gamma_plus)});
    }
    std::cout << (worst <= 1e-9 ? "PASS" : "FAIL")
              << " interval numeric-vs-closed max deviation " << fmt(worst)
              << " (tol 1e-09)\n";
    if (failed && worst > 1e-9) *failed = true;
}

smp::EnsembleSummary simulate_from_config(const smp::RunConfig& cfg,
                                          unsigned workers = 0) {
    if (cfg.model == "discrete_uniform" || cfg.model == "discrete_random") {
        smp::DiscreteSimOptions opts;
        opts.t_max = static_cast<std::int64_t>(cfg.horizon);
        if (cfg.snapshots.empty()) {
            opts.snapshot_times = {opts.t_max};
        } else {
            for (double s : cfg.snapshots)
                opts.snapshot_times.push_back(static_cast<std::int64_t>(s));
        }
        opts.gammas = cfg.gammas;
        opts.n_traj = cfg.ntraj;
        opts.master_seed = cfg.seed;
        opts.workers = workers;
        if (cfg.model == "discrete_uniform")
            return smp::run_discrete(uniform_spec(cfg), opts);
        return smp::run_discrete(random_spec(cfg), opts);
    }
    smp::ContinuousSimOptions opts;
    opts.snapshot_times = cfg.snapshots.empty()
                              ? std::vector<double>{cfg.horizon}
                              : cfg.snapshots;
    opts.n_traj = cfg.ntraj;
    opts.master_seed = cfg.seed;
    opts.workers = workers;
    if (cfg.model == "continuous_uniform")
        return smp::run_continuous(smp::ContinuousUniformSpec(cfg.lambda, cfg.q),
                                   opts);
    return smp::run_continuous(
        smp::StateDependentSpec(smp::AlgebraicFamily{cfg.lambda0, cfg.alpha, cfg.q}),
        opts);
}

void write_summary(const smp::RunConfig& cfg, const smp::EnsembleSummary& s) {
    std::filesystem::create_directories(cfg.out_dir);
    smp::Json j;
    j["run"] = {{"config_hash", smp::config_hash(cfg)},
                {"workers", s.workers},
                {"config", smp::config_to_json(cfg)}};
    j["ensemble"] = smp::summary_to_json(s);
    std::ofstream out(std::filesystem::path(cfg.out_dir) / "summary.json");
    out << j.dump(2) << '\n';
}

void write_histograms(const smp::RunConfig& cfg, const smp::EnsembleSummary& s) {
    for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "histogram_t%g.csv",
                      s.snapshot_times[i]);
        auto out = open_csv(cfg, name);
        out << "y_left,count,mass,density\n";
        const smp::LogHistogram& h = s.snapshots[i];
        for (std::size_t b = 0; b < h.bins(); ++b)
            out << fmt(h.bin_left(b)) << ',' << h.count(b) << ','
                << fmt(h.mass(b)) << ',' << fmt(h.density(b)) << '\n';
    }
}

void write_empirical_moments(const smp::RunConfig& cfg,
                             const smp::EnsembleSummary& s) {
    auto out = open_csv(cfg, "moments.csv");
    out << "t,gamma,empirical_moment,std_error\n";
    for (const smp::MomentEstimate& m : s.moments)
        out << fmt(m.time) << ',' << fmt(m.gamma) << ',' << fmt(m.mean) << ','
            << fmt(m.std_error) << '\n';
    if (!s.cumulative_average.empty()) {
        auto cav = open_csv(cfg, "cumulative_average.csv");
        cav << "t,empirical_mean,std_error\n";
        for (const smp::CumulativeAverageEstimate& c : s.cumulative_average)
            cav << fmt(c.time) << ',' << fmt(c.mean) << ',' << fmt(c.std_error)
                << '\n';
    }
}

void write_paths(const smp::RunConfig& cfg) {
    // Sample paths for small ensembles (fig-1 style illustration).
    const std::uint64_t n = std::min<std::uint64_t>(cfg.ntraj, 100);
    const smp::DiscreteUniformSpec spec = uniform_spec(cfg);
    auto out = open_csv(cfg, "paths.csv");
    out << "trajectory,t,x\n";
    const std::int64_t t_max = static_cast<std::int64_t>(cfg.horizon);
    for (std::uint64_t i = 0; i < n; ++i) {
        smp::RandomStream rng(cfg.seed, i);
        std::int64_t m = 0;
        for (std::int64_t t = 0; t <= t_max; ++t) {
            if (t > 0) m = rng.uniform() < spec.r ? 0 : m + 1;
            out << i << ',' << t << ','
                << fmt(std::pow(spec.mu, static_cast<double>(m))) << '\n';
        }
    }
}

int cmd_analytic(const smp::RunConfig& cfg) {
    if (cfg.model == "discrete_uniform" || cfg.model == "discrete_random") {
        if (wants(cfg, "moments")) write_moments_analytic(cfg);
        if (cfg.model == "discrete_uniform" && wants(cfg, "occupation"))
            write_occupation_analytic(cfg);
        if (cfg.model == "discrete_random" && wants(cfg, "interval"))
            write_interval_sweep(cfg, nullptr);
    } else {
        if (wants(cfg, "stationary")) write_stationary_continuous(cfg);
    }
    return kExitOk;
}

int cmd_simulate(const smp::RunConfig& cfg) {
    if (wants(cfg, "paths") && !cfg.outputs.empty()) {
        write_paths(cfg);
        if (cfg.outputs.size() == 1) return kExitOk;
    }
    const smp::EnsembleSummary s = simulate_from_config(cfg);
    write_summary(cfg, s);
    if (wants(cfg, "histogram")) write_histograms(cfg, s);
    if (wants(cfg, "moments")) write_empirical_moments(cfg, s);
    return kExitOk;
}

int cmd_bursts(const smp::RunConfig& cfg) {
    // r arrives as a double; the rational is its exact binary value.
    const smp::Rational r(cfg.r);
    const smp::BurstTable table = smp::burst_table(cfg.tau, r);
    auto out = open_csv(cfg, "bursts.csv");
    out << "k,m,rho,rho_num,rho_den,K,M\n";
    for (std::int64_t k = 1; k <= cfg.tau + 1; ++k) {
        const smp::Rational& rho = table.rho[k - 1];
        for (std::int64_t m = 0; m <= cfg.tau; ++m) {
            out << k << ',' << m << ',' << fmt(static_cast<double>(rho)) << ','
                << boost::multiprecision::numerator(rho).str() << ','
                << boost::multiprecision::denominator(rho).str() << ','
                << table.K[k - 1][m].str() << ',' << table.M[k - 1][m].str()
                << '\n';
        }
    }
    return kExitOk;
}

int cmd_passage(const smp::RunConfig& cfg) {
    const smp::DiscreteUniformSpec spec = uniform_spec(cfg);
    const smp::PassageStatistics ps =
        smp::passage_statistics(cfg.passage_level, cfg.r);
    const smp::PassageSummary wait =
        smp::run_first_passage(spec, cfg.passage_level, cfg.ntraj, cfg.seed);
    const smp::DrawsSummary draws =
        smp::run_iid_draws(spec, cfg.passage_level, cfg.ntraj, cfg.seed + 1);
    auto out = open_csv(cfg, "passage.csv");
    out << "M,w_analytic,d_analytic,ratio_analytic,w_empirical,w_std_error,"
           "d_empirical,d_std_error,excluded\n";
    out << cfg.passage_level << ',' << fmt(ps.mean_wait) << ','
        << fmt(ps.mean_draws) << ',' << fmt(ps.ratio) << ',' << fmt(wait.mean)
        << ',' << fmt(wait.std_error) << ',' << fmt(draws.mean) << ','
        << fmt(draws.std_error) << ',' << wait.excluded << '\n';
    return kExitOk;
}

int cmd_compare(const smp::RunConfig& cfg) {
    bool failed = false;
    auto report = [&](const std::string& what, double dev, double tol) {
        const bool ok = dev <= tol;
        if (!ok) failed = true;
        std::cout << (ok ? "PASS" : "FAIL") << ' ' << what << " deviation "
                  << fmt(dev) << " (tol " << fmt(tol) << ")\n";
    };

    if (cfg.model == "discrete_random") {
        write_interval_sweep(cfg, &failed);
        return failed ? kExitTolerance : kExitOk;
    }

    const smp::EnsembleSummary s = simulate_from_config(cfg);
    write_summary(cfg, s);
    write_histograms(cfg, s);

    auto cmp = open_csv(cfg, "compare.csv");
    cmp << "quantity,time,deviation,tolerance,pass\n";
    auto record = [&](const std::string& what, double t, double dev, double tol) {
        report(what + " t=" + fmt(t), dev, tol);
        cmp << what << ',' << fmt(t) << ',' << fmt(dev) << ',' << fmt(tol) << ','
            << (dev <= tol ? 1 : 0) << '\n';
    };

    if (cfg.model == "discrete_uniform") {
        const smp::DiscreteUniformSpec spec = uniform_spec(cfg);
        for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
            const auto oracle = smp::occupation_oracle(
                spec, static_cast<std::int64_t>(s.snapshot_times[i]),
                s.snapshots[i]);
            record("occupation_tv", s.snapshot_times[i],
                   smp::tv_distance(s.snapshots[i], oracle), cfg.tv_tol);
        }
        for (const smp::MomentEstimate& m : s.moments) {
            // 4-sigma check only where x^gamma has finite variance.
            const smp::MomentValue second =
                smp::moment(spec, 2.0 * m.gamma, smp::kStationary);
            if (!second.convergent) continue;
            const smp::MomentValue exact =
                smp::moment(spec, m.gamma, static_cast<std::int64_t>(m.time));
            record("moment_gamma" + fmt(m.gamma), m.time,
                   std::abs(m.mean - exact.value), 4.0 * m.std_error);
        }
    } else if (cfg.model == "continuous_uniform") {
        const smp::ContinuousUniformSpec spec(cfg.lambda, cfg.q);
        for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
            const auto oracle =
                smp::transient_oracle(spec, s.snapshot_times[i], s.snapshots[i]);
            record("transient_tv", s.snapshot_times[i],
                   smp::tv_distance(s.snapshots[i], oracle), cfg.tv_tol);
        }
    } else {  // state_dependent
        const smp::AlgebraicFamily fam{cfg.lambda0, cfg.alpha, cfg.q};
        const std::size_t last = s.snapshots.size() - 1;
        const auto oracle = smp::weibull_oracle(fam, s.snapshots[last]);
        record("stationary_tv", s.snapshot_times[last],
               smp::tv_distance(s.snapshots[last], oracle), cfg.tv_tol);
    }
    return failed ? kExitTolerance : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic multiplicative processes with resets"};
    app.require_subcommand(1);

    smp::RunConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--model", cfg.model,
                        "discrete_uniform | discrete_random | "
                        "continuous_uniform | state_dependent");
        sub->add_option("--mu", cfg.mu, "multiplier (discrete uniform)");
        sub->add_option("--r", cfg.r, "reset probability");
        sub->add_option("--lambda", cfg.lambda, "growth rate");
        sub->add_option("--q", cfg.q, "reset frequency");
        sub->add_option("--alpha", cfg.alpha, "algebraic-family exponent");
        sub->add_option("--lambda0", cfg.lambda0, "algebraic-family rate");
        sub->add_option("--gamma", cfg.gammas, "moment orders");
        sub->add_option("--t-max", cfg.horizon, "horizon");
        sub->add_option("--tau", cfg.tau, "burst horizon");
        sub->add_option("--M", cfg.passage_level, "first-passage level");
        sub->add_option("--ntraj", cfg.ntraj, "trajectory count");
        sub->add_option("--seed", cfg.seed, "master seed");
        sub->add_option("--snapshots", cfg.snapshots, "snapshot times");
        sub->add_option("--outputs", cfg.outputs, "requested products");
        sub->add_option("-o,--out", cfg.out_dir, "output directory");
    };

    CLI::App* analytic = app.add_subcommand("analytic", "exact closed-form tables");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble run");
    CLI::App* bursts = app.add_subcommand("bursts", "exact burst combinatorics");
    CLI::App* passage = app.add_subcommand("passage", "first-passage experiment");
    CLI::App* compare =
        app.add_subcommand("compare", "simulation vs theory with tolerances");
    for (CLI::App* sub : {analytic, simulate, bursts, passage, compare})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot read " + config_path);
            smp::Json j;
            in >> j;
            cfg = smp::config_from_json(j);
        }
        if (cfg.model.empty() && (analytic->parsed() || simulate->parsed() ||
                                  compare->parsed() || passage->parsed()))
            cfg.model = "discrete_uniform";
        if (analytic->parsed()) return cmd_analytic(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (bursts->parsed()) return cmd_bursts(cfg);
        if (passage->parsed()) return cmd_passage(cfg);
        return cmd_compare(cfg);
    } catch (const smp::Json::exception& e) {
        std::cerr << "error: malformed config: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
