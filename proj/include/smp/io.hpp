#pragma once

// JSON schemas for parameter laws, run configurations, and ensemble
// summaries, plus the config hash stamped into every output file.
// Serialization uses ordered_json so output key order is stable and
// summaries are byte-reproducible.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "smp/analytics.hpp"
#include "smp/histogram.hpp"
#include "smp/laws.hpp"
#include "smp/montecarlo.hpp"

namespace smp {

using Json = nlohmann::ordered_json;

inline Json law_to_json(const ParamLaw& law) {
    Json j;
    if (const auto* p = std::get_if<PointMass>(&law.variant())) {
        j["kind"] = "point_mass";
        j["value"] = p->value;
    } else if (const auto* t = std::get_if<TwoDelta>(&law.variant())) {
        j["kind"] = "two_delta";
        j["a"] = t->a;
        j["mu0"] = t->mu0;
    } else if (const auto* u = std::get_if<LogUniform>(&law.variant())) {
        j["kind"] = "log_uniform";
        j["lo"] = u->lo;
        j["hi"] = u->hi;
    } else if (const auto* n = std::get_if<LogNormalLaw>(&law.variant())) {
        j["kind"] = "log_normal";
        j["mean_log"] = n->mean_log;
        j["sd_log"] = n->sd_log;
    } else {
        const auto& e = std::get<EmpiricalAtoms>(law.variant());
        j["kind"] = "empirical";
        Json atoms = Json::array();
        for (const Atom& a : e.atoms)
            atoms.push_back({{"value", a.value}, {"weight", a.weight}});
        j["atoms"] = atoms;
    }
    return j;
}

inline ParamLaw law_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "point_mass")
        return ParamLaw(PointMass{j.at("value").get<double>()});
    if (kind == "two_delta")
        return ParamLaw(TwoDelta{j.at("a").get<double>(), j.at("mu0").get<double>()});
    if (kind == "log_uniform")
        return ParamLaw(LogUniform{j.at("lo").get<double>(), j.at("hi").get<double>()});
    if (kind == "log_normal")
        return ParamLaw(LogNormalLaw{j.at("mean_log").get<double>(),
                                     j.at("sd_log").get<double>()});
    if (kind == "empirical") {
        EmpiricalAtoms e;
        for (const Json& a : j.at("atoms"))
            e.atoms.push_back({a.at("value").get<double>(), a.at("weight").get<double>()});
        return ParamLaw(std::move(e));
    }
    throw std::invalid_argument("unknown law kind: " + kind);
}

struct RunConfig {
    std::string model;  // discrete_uniform | discrete_random |
                        // continuous_uniform | state_dependent
    // discrete_uniform
    double mu = 0.0;
    double r = 0.0;
    // discrete_random
    std::optional<ParamLaw> multiplier_law;
    std::optional<ParamLaw> reset_law;
    std::optional<ParamLaw> initial_law;
    // continuous_uniform
    double lambda = 0.0;
    double q = 0.0;
    // state_dependent (algebraic family)
    double lambda0 = 0.0;
    double alpha = 0.0;
    // run controls
    double horizon = 0.0;  // t_max (discrete) or final time (continuous)
    std::vector<double> snapshots;
    std::vector<double> gammas;
    std::uint64_t ntraj = 10000;
    std::uint64_t seed = 1;
    std::int64_t tau = 0;  // bursts product
    std::int64_t passage_level = 0;
    std::vector<std::string> outputs;
    std::string out_dir = ".";
    double tv_tol = 0.01;
};

inline Json config_to_json(const RunConfig& c) {
    Json j;
    j["model"] = c.model;
    if (c.model == "discrete_uniform") {
        j["mu"] = c.mu;
        j["r"] = c.r;
    } else if (c.model == "discrete_random") {
        j["r"] = c.r;
        if (c.multiplier_law) j["multiplier_law"] = law_to_json(*c.multiplier_law);
        if (c.reset_law) j["reset_law"] = law_to_json(*c.reset_law);
        if (c.initial_law) j["initial_law"] = law_to_json(*c.initial_law);
    } else if (c.model == "continuous_uniform") {
        j["lambda"] = c.lambda;
        j["q"] = c.q;
    } else if (c.model == "state_dependent") {
        j["lambda0"] = c.lambda0;
        j["alpha"] = c.alpha;
        j["q"] = c.q;
    }
    j["horizon"] = c.horizon;
    j["snapshots"] = c.snapshots;
    j["gammas"] = c.gammas;
    j["ntraj"] = c.ntraj;
    j["seed"] = c.seed;
    j["tau"] = c.tau;
    j["M"] = c.passage_level;
    j["outputs"] = c.outputs;
    j["out_dir"] = c.out_dir;
    j["tv_tol"] = c.tv_tol;
    return j;
}

inline RunConfig config_from_json(const Json& j) {
    RunConfig c;
    c.model = j.at("model").get<std::string>();
    if (c.model != "discrete_uniform" && c.model != "discrete_random" &&
        c.model != "continuous_uniform" && c.model != "state_dependent")
        throw std::invalid_argument("unknown model: " + c.model);
    if (j.contains("mu")) c.mu = j["mu"].get<double>();
    if (j.contains("r")) c.r = j["r"].get<double>();
    if (j.contains("multiplier_law"))
        c.multiplier_law = law_from_json(j["multiplier_law"]);
    if (j.contains("reset_law")) c.reset_law = law_from_json(j["reset_law"]);
    if (j.contains("initial_law")) c.initial_law = law_from_json(j["initial_law"]);
    if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
    if (j.contains("q")) c.q = j["q"].get<double>();
    if (j.contains("lambda0")) c.lambda0 = j["lambda0"].get<double>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<double>();
    if (j.contains("snapshots")) c.snapshots = j["snapshots"].get<std::vector<double>>();
    if (j.contains("gammas")) c.gammas = j["gammas"].get<std::vector<double>>();
    if (j.contains("ntraj")) c.ntraj = j["ntraj"].get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tau")) c.tau = j["tau"].get<std::int64_t>();
    if (j.contains("M")) c.passage_level = j["M"].get<std::int64_t>();
    if (j.contains("outputs")) c.outputs = j["outputs"].get<std::vector<std::string>>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("tv_tol")) c.tv_tol = j["tv_tol"].get<double>();
    return c;
}

// FNV-1a over the canonical serialized config.
inline std::uint64_t config_hash(const RunConfig& c) {
    const std::string s = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline Json histogram_to_json(const LogHistogram& h) {
    Json j;
    j["y_lo"] = h.y_lo();
    j["dy"] = h.dy();
    j["counts"] = h.counts();
    j["underflow"] = h.underflow();
    j["overflow"] = h.overflow();
    j["total"] = h.total();
    return j;
}

// Canonical summary serialization. The worker count is deliberately
// omitted: the same (spec, seed, n_traj) must serialize identically no
// matter how the trajectories were scheduled.
inline Json summary_to_json(const EnsembleSummary& s) {
    Json j;
    j["model"] = s.model;
    j["master_seed"] = s.master_seed;
    j["n_traj"] = s.n_traj;
    j["rng"] = s.rng;
    Json snaps = Json::array();
    for (std::size_t i = 0; i < s.snapshots.size(); ++i)
        snaps.push_back({{"time", s.snapshot_times[i]},
                         {"histogram", histogram_to_json(s.snapshots[i])}});
    j["snapshots"] = snaps;
    if (s.time_average) j["time_average"] = histogram_to_json(*s.time_average);
    Json moms = Json::array();
    for (const MomentEstimate& m : s.moments)
        moms.push_back({{"gamma", m.gamma},
                        {"time", m.time},
                        {"mean", m.mean},
                        {"std_error", m.std_error}});
    j["moments"] = moms;
    Json cum = Json::array();
    for (const CumulativeAverageEstimate& c : s.cumulative_average)
        cum.push_back(
            {{"time", c.time}, {"mean", c.mean}, {"std_error", c.std_error}});
    j["cumulative_average"] = cum;
    return j;
}

}  // namespace smp
