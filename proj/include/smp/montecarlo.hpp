#pragma once

// Reproducible parallel simulation of the four model variants. Trajectories
// are keyed by (master_seed, trajectory_index) on counter-based streams and
// processed in fixed-size chunks; chunk partials are merged in index order,
// so results are bit-identical for any worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "smp/analytics.hpp"
#include "smp/continuum.hpp"
#include "smp/histogram.hpp"
#include "smp/laws.hpp"
#include "smp/random.hpp"

namespace smp {

// Streaming sum of exp(ln_term) values in log space; immune to overflow of
// x^gamma sums at large gamma*y.
class LogSumExp {
public:
    void add(double ln_term) {
        if (ln_term <= max_) {
            sum_ += std::exp(ln_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - ln_term) + 1.0;
            max_ = ln_term;
        }
    }

    void merge(const LogSumExp& o) {
        if (o.sum_ == 0.0) return;
        if (o.max_ <= max_) {
            sum_ += o.sum_ * std::exp(o.max_ - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
            max_ = o.max_;
        }
    }

    double log_total() const {
        if (sum_ == 0.0) return -kInf;
        return max_ + std::log(sum_);
    }

private:
    double max_ = -kInf;
    double sum_ = 0.0;
};

struct MomentEstimate {
    double gamma;
    double time;
    double mean;
    double std_error;
};

struct CumulativeAverageEstimate {
    double time;
    double mean;
    double std_error;
};

struct EnsembleSummary {
    std::string model;
    std::uint64_t master_seed = 0;
    std::uint64_t n_traj = 0;
    unsigned workers = 0;  // provenance only; not part of the canonical JSON
    std::string rng = "philox4x32-10";
    std::vector<double> snapshot_times;
    std::vector<LogHistogram> snapshots;
    std::optional<LogHistogram> time_average;
    std::vector<MomentEstimate> moments;
    std::vector<CumulativeAverageEstimate> cumulative_average;
};

namespace detail {

inline unsigned resolve_workers(unsigned requested) {
    if (requested) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    if (!hw) hw = 1;
    if (const char* env = std::getenv("SMP_THREADS")) {
        const unsigned long cap = std::strtoul(env, nullptr, 10);
        if (cap) hw = std::min<unsigned long>(hw, cap);
    }
    return hw;
}

inline constexpr std::uint64_t kChunkTraj = 4096;

// Runs per_traj(partial, index) over all trajectory indices, one fixed-size
// chunk at a time, and merges chunk partials in index order.
template <class Partial, class Fn>
Partial run_chunked(std::uint64_t n_traj, unsigned workers, const Partial& proto,
                    Fn&& per_traj) {
    const std::uint64_t n_chunks = (n_traj + kChunkTraj - 1) / kChunkTraj;
    std::vector<Partial> partials(static_cast<std::size_t>(n_chunks), proto);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (;;) {
                const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
                if (c >= n_chunks) return;
                const std::uint64_t lo = c * kChunkTraj;
                const std::uint64_t hi = std::min(n_traj, lo + kChunkTraj);
                Partial& p = partials[static_cast<std::size_t>(c)];
                for (std::uint64_t i = lo; i < hi; ++i) per_traj(p, i);
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n_chunks, std::memory_order_relaxed);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    Partial total = proto;
    for (const Partial& p : partials) total.merge(p);
    return total;
}

// Accumulators shared by the discrete and continuous ensemble runs.
struct EnsemblePartial {
    std::vector<LogHistogram> snapshots;
    LogHistogram time_average;
    bool track_time_average = false;
    // [snapshot][gamma]: sums of exp(g*y) and exp(2*g*y)
    std::vector<std::vector<LogSumExp>> mom1, mom2;
    // [snapshot]: sums of xbar and xbar^2
    std::vector<LogSumExp> cum1, cum2;
    bool track_cumulative = false;

    void init(std::size_t n_snapshots, std::size_t n_gammas,
              const LogHistogram& layout, bool time_avg, bool cumulative) {
        snapshots.assign(n_snapshots, layout);
        track_time_average = time_avg;
        if (time_avg) time_average = layout;
        mom1.assign(n_snapshots, std::vector<LogSumExp>(n_gammas));
        mom2.assign(n_snapshots, std::vector<LogSumExp>(n_gammas));
        track_cumulative = cumulative;
        cum1.assign(n_snapshots, LogSumExp{});
        cum2.assign(n_snapshots, LogSumExp{});
    }

    void record(std::size_t si, double y, const std::vector<double>& gammas) {
        snapshots[si].add_log(y);
        for (std::size_t g = 0; g < gammas.size(); ++g) {
            mom1[si][g].add(gammas[g] * y);
            mom2[si][g].add(2.0 * gammas[g] * y);
        }
    }

    void merge(const EnsemblePartial& o) {
        for (std::size_t i = 0; i < snapshots.size(); ++i)
            snapshots[i].merge(o.snapshots[i]);
        if (track_time_average) time_average.merge(o.time_average);
        for (std::size_t i = 0; i < mom1.size(); ++i)
            for (std::size_t g = 0; g < mom1[i].size(); ++g) {
                mom1[i][g].merge(o.mom1[i][g]);
                mom2[i][g].merge(o.mom2[i][g]);
            }
        for (std::size_t i = 0; i < cum1.size(); ++i) {
            cum1[i].merge(o.cum1[i]);
            cum2[i].merge(o.cum2[i]);
        }
    }
};

inline void finalize_estimates(const EnsemblePartial& total,
                               const std::vector<double>& gammas,
                               const std::vector<double>& snapshot_times,
                               std::uint64_t n_traj, EnsembleSummary& out) {
    const double ln_n = std::log(static_cast<double>(n_traj));
    out.snapshot_times = snapshot_times;
    out.snapshots = total.snapshots;
    if (total.track_time_average) out.time_average = total.time_average;
    for (std::size_t si = 0; si < snapshot_times.size(); ++si) {
        for (std::size_t g = 0; g < gammas.size(); ++g) {
            const double mean = std::exp(total.mom1[si][g].log_total() - ln_n);
            const double m2 = std::exp(total.mom2[si][g].log_total() - ln_n);
            const double var = std::max(0.0, m2 - mean * mean);
            out.moments.push_back({gammas[g], snapshot_times[si], mean,
                                   std::sqrt(var / static_cast<double>(n_traj))});
        }
        if (total.track_cumulative) {
            const double mean = std::exp(total.cum1[si].log_total() - ln_n);
            const double m2 = std::exp(total.cum2[si].log_total() - ln_n);
            const double var = std::max(0.0, m2 - mean * mean);
            out.cumulative_average.push_back(
                {snapshot_times[si], mean,
                 std::sqrt(var / static_cast<double>(n_traj))});
        }
    }
}

}  // namespace detail

struct DiscreteSimOptions {
    std::int64_t t_max = 100;
    std::vector<std::int64_t> snapshot_times;  // sorted ascending, <= t_max
    std::vector<double> gammas;
    std::uint64_t n_traj = 10000;
    std::uint64_t master_seed = 1;
    unsigned workers = 0;  // 0: hardware parallelism (capped by SMP_THREADS)
    bool time_average = true;
    bool cumulative_average = true;
    // Histogram layout; dy = 0 selects the model default (level-aligned bins
    // for the uniform process, dy = 0.05 otherwise).
    double hist_y_lo = 0.0;
    double hist_dy = 0.0;
    std::size_t hist_bins = 0;

    void validate() const {
        if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
        if (t_max < 0) throw std::invalid_argument("t_max must be >= 0");
        for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
            if (snapshot_times[i] < 0 || snapshot_times[i] > t_max)
                throw std::invalid_argument("snapshot times must lie in [0, t_max]");
            if (i && snapshot_times[i] <= snapshot_times[i - 1])
                throw std::invalid_argument("snapshot times must be increasing");
        }
    }
};

namespace detail {

inline LogHistogram discrete_layout(const DiscreteSimOptions& opts,
                                    double level_dy) {
    if (opts.hist_dy > 0.0)
        return LogHistogram(opts.hist_y_lo, opts.hist_dy,
                            opts.hist_bins ? opts.hist_bins : 1000);
    if (level_dy > 0.0) {
        // Bins centered on the lattice m * |ln mu|.
        const std::size_t bins = static_cast<std::size_t>(
            std::min<std::int64_t>(opts.t_max + 1, 4096));
        return LogHistogram(-0.5 * level_dy, level_dy, bins);
    }
    return LogHistogram(-25.0, 0.05, 1000);
}

template <class Step, class Init>
EnsembleSummary run_discrete_impl(const std::string& model, double r,
                                  const DiscreteSimOptions& opts,
                                  const LogHistogram& layout, Init&& init_y,
                                  Step&& step_y) {
    opts.validate();
    const unsigned workers = resolve_workers(opts.workers);
    EnsemblePartial proto;
    proto.init(opts.snapshot_times.size(), opts.gammas.size(), layout,
               opts.time_average, opts.cumulative_average);

    auto per_traj = [&](EnsemblePartial& p, std::uint64_t idx) {
        RandomStream rng(opts.master_seed, idx);
        double y = init_y(rng);
        LogSumExp running;  // sum of x_tau over the trajectory so far
        std::size_t si = 0;
        for (std::int64_t t = 0; t <= opts.t_max; ++t) {
            if (t > 0) y = rng.uniform() < r ? step_y(rng, y, true)
                                             : step_y(rng, y, false);
            if (p.track_time_average) p.time_average.add_log(y);
            if (p.track_cumulative) running.add(y);
            if (si < opts.snapshot_times.size() && opts.snapshot_times[si] == t) {
                p.record(si, y, opts.gammas);
                if (p.track_cumulative) {
                    const double ln_xbar =
                        running.log_total() - std::log(static_cast<double>(t + 1));
                    p.cum1[si].add(ln_xbar);
                    p.cum2[si].add(2.0 * ln_xbar);
                }
                ++si;
            }
        }
    };

    const EnsemblePartial total =
        run_chunked(opts.n_traj, workers, proto, per_traj);

    EnsembleSummary out;
    out.model = model;
    out.master_seed = opts.master_seed;
    out.n_traj = opts.n_traj;
    out.workers = workers;
    std::vector<double> times(opts.snapshot_times.begin(),
                              opts.snapshot_times.end());
    finalize_estimates(total, opts.gammas, times, opts.n_traj, out);
    return out;
}

}  // namespace detail

inline EnsembleSummary run_discrete(const DiscreteUniformSpec& spec,
                                    const DiscreteSimOptions& opts) {
    const double lnmu = std::log(spec.mu);
    const LogHistogram layout = detail::discrete_layout(opts, std::abs(lnmu));
    return detail::run_discrete_impl(
        "discrete_uniform", spec.r, opts, layout,
        [](RandomStream&) { return 0.0; },
        [lnmu](RandomStream&, double y, bool reset) {
            return reset ? 0.0 : y + lnmu;
        });
}

inline EnsembleSummary run_discrete(const DiscreteRandomSpec& spec,
                                    const DiscreteSimOptions& opts) {
    const LogHistogram layout = detail::discrete_layout(opts, 0.0);
    return detail::run_discrete_impl(
        "discrete_random", spec.r, opts, layout,
        [&spec](RandomStream& rng) { return spec.initial_law.sample_log(rng); },
        [&spec](RandomStream& rng, double y, bool reset) {
            return reset ? spec.reset_law.sample_log(rng)
                         : y + spec.multiplier_law.sample_log(rng);
        });
}

// First-passage experiment: steps until x_t = mu^M for the first time.
struct PassageSummary {
    std::uint64_t n_traj = 0;
    std::uint64_t excluded = 0;  // trajectories that hit the step cap
    double mean = 0.0;
    double std_error = 0.0;
};

inline constexpr std::uint64_t kPassageStepCap = 1000000000ull;

inline PassageSummary run_first_passage(const DiscreteUniformSpec& spec,
                                        std::int64_t M, std::uint64_t n_traj,
                                        std::uint64_t seed,
                                        unsigned workers = 0) {
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    const PassageStatistics ps = passage_statistics(M, spec.r);
    if (ps.mean_wait > 0.01 * static_cast<double>(kPassageStepCap))
        throw std::invalid_argument(
            "expected waiting time too close to the step cap");

    struct Partial {
        double sum = 0.0, sumsq = 0.0;
        std::uint64_t n = 0, excluded = 0;
        void merge(const Partial& o) {
            sum += o.sum;
            sumsq += o.sumsq;
            n += o.n;
            excluded += o.excluded;
        }
    };
    const unsigned w = detail::resolve_workers(workers);
    const Partial total = detail::run_chunked(
        n_traj, w, Partial{}, [&](Partial& p, std::uint64_t idx) {
            RandomStream rng(seed, idx);
            std::int64_t m = 0;
            for (std::uint64_t step = 1; step <= kPassageStepCap; ++step) {
                if (rng.uniform() < spec.r) {
                    m = 0;
                } else if (++m == M) {
                    const double s = static_cast<double>(step);
                    p.sum += s;
                    p.sumsq += s * s;
                    ++p.n;
                    return;
                }
            }
            ++p.excluded;
        });

    PassageSummary out;
    out.n_traj = n_traj;
    out.excluded = total.excluded;
    if (total.n) {
        const double n = static_cast<double>(total.n);
        out.mean = total.sum / n;
        const double var = std::max(0.0, total.sumsq / n - out.mean * out.mean);
        out.std_error = std::sqrt(var / n);
    }
    return out;
}

// Draws m from the stationary geometric law until m = M first occurs with
// all preceding draws below M. A draw above M voids the trajectory, which
// then contributes zero; the mean over all trajectories estimates d_X.
struct DrawsSummary {
    std::uint64_t n_traj = 0;
    std::uint64_t successes = 0;
    double mean = 0.0;       // estimate of d_X
    double std_error = 0.0;
};

inline DrawsSummary run_iid_draws(const DiscreteUniformSpec& spec,
                                  std::int64_t M, std::uint64_t n_traj,
                                  std::uint64_t seed, unsigned workers = 0) {
    if (M < 0) throw std::invalid_argument("M must be >= 0");
    const double ln_keep = std::log1p(-spec.r);

    struct Partial {
        double sum = 0.0, sumsq = 0.0;
        std::uint64_t successes = 0;
        void merge(const Partial& o) {
            sum += o.sum;
            sumsq += o.sumsq;
            successes += o.successes;
        }
    };
    const unsigned w = detail::resolve_workers(workers);
    const Partial total = detail::run_chunked(
        n_traj, w, Partial{}, [&](Partial& p, std::uint64_t idx) {
            RandomStream rng(seed, idx);
            for (std::uint64_t draws = 1; draws <= kPassageStepCap; ++draws) {
                const std::int64_t m = static_cast<std::int64_t>(
                    std::log(rng.uniform_open()) / ln_keep);
                if (m == M) {
                    const double d = static_cast<double>(draws);
                    p.sum += d;
                    p.sumsq += d * d;
                    ++p.successes;
                    return;
                }
                if (m > M) return;  // voided trajectory, contributes zero
            }
        });

    DrawsSummary out;
    out.n_traj = n_traj;
    out.successes = total.successes;
    const double n = static_cast<double>(n_traj);
    out.mean = total.sum / n;
    const double var = std::max(0.0, total.sumsq / n - out.mean * out.mean);
    out.std_error = std::sqrt(var / n);
    return out;
}

struct ContinuousSimOptions {
    std::vector<double> snapshot_times;  // sorted ascending, >= 0
    std::uint64_t n_traj = 10000;
    std::uint64_t master_seed = 1;
    unsigned workers = 0;
    double hist_y_lo = 0.0;
    double hist_dy = 0.05;
    std::size_t hist_bins = 400;
    // Required for state-dependent resets with non-constant q(x): an upper
    // bound on q over the reachable states, used for thinning.
    double hazard_bound = 0.0;

    void validate() const {
        if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
        if (snapshot_times.empty())
            throw std::invalid_argument("at least one snapshot time required");
        for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
            if (!(snapshot_times[i] >= 0.0))
                throw std::invalid_argument("snapshot times must be >= 0");
            if (i && snapshot_times[i] <= snapshot_times[i - 1])
                throw std::invalid_argument("snapshot times must be increasing");
        }
    }
};

namespace detail {

// Deterministic flow of dx/dt = lambda(x) over dt. Closed form for the
// algebraic family, adaptive step-doubling RK4 otherwise.
inline double advance_flow(const StateDependentSpec& spec, double x, double dt) {
    if (spec.family) {
        const auto& f = *spec.family;
        if (f.alpha == 0.0) return x * std::exp(f.lambda0 * dt);
        return std::pow(std::pow(x, f.alpha) + f.alpha * f.lambda0 * dt,
                        1.0 / f.alpha);
    }
    const auto rk4 = [&](double x0, double h) {
        const double k1 = spec.lambda_fn(x0);
        const double k2 = spec.lambda_fn(x0 + 0.5 * h * k1);
        const double k3 = spec.lambda_fn(x0 + 0.5 * h * k2);
        const double k4 = spec.lambda_fn(x0 + h * k3);
        return x0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    double t = 0.0, h = dt;
    while (t < dt) {
        if (t + h > dt) h = dt - t;
        const double full = rk4(x, h);
        const double half = rk4(rk4(x, 0.5 * h), 0.5 * h);
        if (std::abs(full - half) <= 1e-10 * std::max(1.0, std::abs(half))) {
            x = half;
            t += h;
            h *= 2.0;
        } else {
            h *= 0.5;
        }
    }
    return x;
}

template <class Segment>
EnsembleSummary run_continuous_impl(const std::string& model,
                                    const ContinuousSimOptions& opts,
                                    Segment&& per_traj) {
    opts.validate();
    const unsigned workers = resolve_workers(opts.workers);
    EnsemblePartial proto;
    const LogHistogram layout(opts.hist_y_lo, opts.hist_dy, opts.hist_bins);
    proto.init(opts.snapshot_times.size(), 0, layout, false, false);

    const EnsemblePartial total =
        run_chunked(opts.n_traj, workers, proto, per_traj);

    EnsembleSummary out;
    out.model = model;
    out.master_seed = opts.master_seed;
    out.n_traj = opts.n_traj;
    out.workers = workers;
    finalize_estimates(total, {}, opts.snapshot_times, opts.n_traj, out);
    return out;
}

}  // namespace detail

inline EnsembleSummary run_continuous(const ContinuousUniformSpec& spec,
                                      const ContinuousSimOptions& opts) {
    const auto& snaps = opts.snapshot_times;
    return detail::run_continuous_impl(
        "continuous_uniform", opts, [&](detail::EnsemblePartial& p, std::uint64_t idx) {
            RandomStream rng(opts.master_seed, idx);
            double y = std::log(spec.f0_quantile(rng.uniform()));
            double t = 0.0;
            std::size_t si = 0;
            while (si < snaps.size()) {
                const double dt = rng.exponential(spec.q);
                while (si < snaps.size() && snaps[si] < t + dt) {
                    p.snapshots[si].add_log(y + spec.lambda * (snaps[si] - t));
                    ++si;
                }
                t += dt;
                y = 0.0;  // reset to x = 1
            }
        });
}

inline EnsembleSummary run_continuous(const StateDependentSpec& spec,
                                      const ContinuousSimOptions& opts) {
    const bool constant_q = static_cast<bool>(spec.family);
    if (!constant_q && !(opts.hazard_bound > 0.0))
        throw std::invalid_argument(
            "state-dependent q(x) requires a declared hazard bound");
    const auto& snaps = opts.snapshot_times;
    return detail::run_continuous_impl(
        "state_dependent", opts, [&](detail::EnsemblePartial& p, std::uint64_t idx) {
            RandomStream rng(opts.master_seed, idx);
            double x = 1.0;  // reinjection value; also the initial condition
            double t = 0.0;
            std::size_t si = 0;
            if (constant_q) {
                const double q = spec.family->q;
                while (si < snaps.size()) {
                    const double dt = rng.exponential(q);
                    while (si < snaps.size() && snaps[si] < t + dt) {
                        p.snapshots[si].add_log(
                            std::log(detail::advance_flow(spec, x, snaps[si] - t)));
                        ++si;
                    }
                    t += dt;
                    x = 1.0;
                }
            } else {
                // Thinning against the declared bound.
                const double bound = opts.hazard_bound;
                while (si < snaps.size()) {
                    const double dt = rng.exponential(bound);
                    while (si < snaps.size() && snaps[si] < t + dt) {
                        p.snapshots[si].add_log(
                            std::log(detail::advance_flow(spec, x, snaps[si] - t)));
                        ++si;
                    }
                    x = detail::advance_flow(spec, x, dt);
                    t += dt;
                    const double qx = spec.q_fn(x);
                    if (qx > bound)
                        throw std::runtime_error(
                            "hazard bound violated: q(" + std::to_string(x) +
                            ") = " + std::to_string(qx) + " > " +
                            std::to_string(bound));
                    if (rng.uniform() < qx / bound) x = 1.0;
                }
            }
        });
}

}  // namespace smp
