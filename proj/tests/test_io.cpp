#include <doctest.h>

#include "smp/io.hpp"

using namespace smp;

TEST_CASE("law serialization round-trips") {
    const std::vector<ParamLaw> laws = {
        ParamLaw(PointMass{1.3}), ParamLaw(TwoDelta{0.4, 2.0}),
        ParamLaw(LogUniform{0.5, 2.5}), ParamLaw(LogNormalLaw{0.1, 0.6}),
        ParamLaw(EmpiricalAtoms{{{0.5, 0.5}, {3.0, 0.5}}})};
    for (const ParamLaw& law : laws) {
        const ParamLaw back = law_from_json(law_to_json(law));
        CHECK(law_to_json(back) == law_to_json(law));
        for (double g : {-1.0, 0.5, 2.0})
            CHECK(back.moment(g) == law.moment(g));
    }
    CHECK_THROWS_AS(law_from_json(Json{{"kind", "cauchy"}}), std::invalid_argument);
}

TEST_CASE("run configuration round-trips through JSON") {
    RunConfig c;
    c.model = "discrete_random";
    c.r = 0.2;
    c.multiplier_law = ParamLaw(TwoDelta{0.5, 2.718});
    c.reset_law = ParamLaw(PointMass{1.0});
    c.horizon = 100;
    c.snapshots = {1, 10, 100};
    c.gammas = {0.5, 1.0};
    c.ntraj = 12345;
    c.seed = 99;
    c.outputs = {"moments", "histogram"};
    c.out_dir = "out";
    c.tv_tol = 0.005;
    const RunConfig back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(config_hash(back) == config_hash(c));

    RunConfig other = c;
    other.seed = 100;
    CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("unknown models are rejected") {
    Json j;
    j["model"] = "quantum";
    CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
}

TEST_CASE("summary serialization is stable and omits scheduling details") {
    EnsembleSummary s;
    s.model = "discrete_uniform";
    s.master_seed = 5;
    s.n_traj = 10;
    s.workers = 16;
    s.snapshot_times = {3.0};
    s.snapshots.emplace_back(0.0, 1.0, 4);
    s.snapshots[0].add_log(1.5);
    s.moments.push_back({1.0, 3.0, 2.5, 0.1});
    const Json j = summary_to_json(s);
    CHECK(j.dump().find("workers") == std::string::npos);
    s.workers = 1;
    CHECK(summary_to_json(s).dump() == j.dump());
}
