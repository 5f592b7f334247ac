#include <algorithm>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "gridfreq/engine.hpp"
#include "gridfreq/error.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/scenario.hpp"

using namespace gridfreq;

namespace {

const std::filesystem::path data_dir = GRIDFREQ_DATA_DIR;

const GridModel& ieee39() {
    static const GridModel m = load_grid_config_file(data_dir / "ieee39.json");
    return m;
}

Scenario scenario(const std::string& file) {
    return load_scenario_file(data_dir / "scenarios" / file);
}

// Deterministic profiles at forecast, relays off, no events.
Scenario quiet(double duration) {
    Scenario sc = scenario("s1a.json");
    sc.events.clear();
    sc.duration = duration;
    sc.ufls_enabled = false;
    sc.profiles.wind_source = ProfileSource::constant;
    sc.profiles.load_source = ProfileSource::constant;
    return sc;
}

double column_min(const Trajectory& tr, const std::string& name) {
    const auto v = tr.column(name);
    return *std::min_element(v.begin(), v.end());
}

}  // namespace

TEST(Engine, EquilibriumHoldsForTenMinutes) {
    const auto tr = run_scenario(ieee39(), quiet(600.0));
    double worst = 0.0;
    for (const auto& c : tr.columns()) {
        if (c.size() > 6 && c.compare(c.size() - 6, 6, "_dw_pu") == 0) {
            for (double v : tr.column(c)) {
                worst = std::max(worst, std::abs(v));
            }
        }
    }
    EXPECT_LT(worst, 1e-6);
    EXPECT_LT(tr.stats.max_solve_residual_pu, 1e-9);
    EXPECT_LT(tr.stats.max_balance_residual_pu, 1e-9);
    EXPECT_EQ(tr.stats.steps, 60000u);
}

TEST(Engine, InitialRateOfChangeMatchesSwingEquation) {
    const auto grid = load_grid_config_file(data_dir / "single_area.json");
    auto sc = load_scenario_file(data_dir / "scenarios" / "droop_step.json");
    sc.duration = 10.1;
    sc.output_interval = 0.01;
    const auto tr = run_scenario(grid, sc);
    const auto t = tr.column("t");
    const auto f = tr.column("f_coi_hz");
    const auto k = static_cast<std::size_t>(std::lround(10.0 / 0.01));
    ASSERT_NEAR(t[k], 10.0, 1e-9);
    // 50 MW on 1000 MVA with H_sys = (5*600 + 3*400)/1000 = 4.2 s.
    const double rocof = -50.0 / (2.0 * 4.2 * 1000.0) * 60.0;
    const double slope = (f[k + 2] - f[k]) / (t[k + 2] - t[k]);
    EXPECT_NEAR(slope / rocof, 1.0, 0.01);
}

TEST(Engine, DroopLawSettledFrequency) {
    const auto grid = load_grid_config_file(data_dir / "single_area.json");
    const auto sc = load_scenario_file(data_dir / "scenarios" / "droop_step.json");
    const auto tr = run_scenario(grid, sc);
    const double df = tr.column("f_coi_hz").back() - 60.0;
    const double expected = -50.0 / (600.0 / 0.05 + 400.0 / 0.05) * 60.0;
    EXPECT_NEAR(df / expected, 1.0, 0.01);
    EXPECT_NEAR(tr.column("genG1_pm_mw").back(), 330.0, 0.5);
    EXPECT_NEAR(tr.column("genG2_pm_mw").back(), 220.0, 0.5);
}

TEST(Engine, StepHalvingMovesNadirLessThanMillihertz) {
    auto sc = quiet(40.0);
    sc.events = scenario("s2a.json").events;
    for (auto& e : sc.events) {
        e.time = 5.0;
    }
    const auto coarse = run_scenario(ieee39(), sc);
    sc.dt = 0.005;
    const auto fine = run_scenario(ieee39(), sc);
    const double a = column_min(coarse, "f_coi_hz");
    const double b = column_min(fine, "f_coi_hz");
    EXPECT_LT(a, 59.5);
    EXPECT_LT(std::abs(a - b), 1e-3);
    EXPECT_LT(coarse.stats.max_solve_residual_pu, 1e-9);
    EXPECT_LT(fine.stats.max_solve_residual_pu, 1e-9);
}

TEST(Engine, RerunIsBitIdentical) {
    auto sc = scenario("s2b.json");
    sc.duration = 320.0;
    const auto a = run_scenario(ieee39(), sc);
    const auto b = run_scenario(ieee39(), sc);
    EXPECT_EQ(trajectory_csv(a), trajectory_csv(b));
    EXPECT_EQ(metrics_to_json(compute_metrics(a)), metrics_to_json(compute_metrics(b)));
    EXPECT_EQ(a.log, b.log);
}

TEST(Engine, CasesShareProfilesForTheSameSeed) {
    const auto a = build_profiles(ieee39(), scenario("s1a.json"));
    const auto b = build_profiles(ieee39(), scenario("s1b.json"));
    EXPECT_EQ(profile_hash(a), profile_hash(b));
    EXPECT_TRUE(a.battery.empty());
    EXPECT_FALSE(b.battery.empty());
    auto other = scenario("s1a.json");
    other.seed = 2;
    EXPECT_NE(profile_hash(build_profiles(ieee39(), other)), profile_hash(a));
    EXPECT_EQ(a.seconds, 601u);
    EXPECT_EQ(a.wind.size(), 4u);
}

TEST(Engine, CaseBIdealTrackingHoldsSchedule) {
    auto sc = scenario("s1b.json");
    sc.events.clear();
    sc.duration = 120.0;
    sc.output_interval = 1.0;
    sc.dispatch.mode = DispatchErrorMode::ideal;
    const auto tr = run_scenario(ieee39(), sc);
    const auto& m = ieee39();
    int checked = 0;
    int dispatched = 0;
    for (const auto& bus : m.buses) {
        if (!bus.dispatched) {
            continue;
        }
        ++dispatched;
        const double schedule = bus.wind_mw.value_or(0.0) - bus.load_mw.value_or(0.0);
        for (double v : tr.column("net" + std::to_string(bus.id) + "_mw")) {
            ASSERT_NEAR(v, schedule, 1e-9) << bus.id;
            ++checked;
        }
    }
    EXPECT_EQ(dispatched, 21);
    EXPECT_EQ(checked, 121 * dispatched);
}

TEST(Engine, TripsReduceOnlineRating) {
    Simulation s1(ieee39(), scenario("s1a.json"));
    EXPECT_DOUBLE_EQ(s1.online_rating_mva(), 11520.0);
    for (const auto& e : scenario("s1a.json").events) {
        s1.apply_contingency(e);
    }
    EXPECT_DOUBLE_EQ(s1.online_rating_mva(), 11520.0 - 1520.0);
    Simulation s2(ieee39(), scenario("s2a.json"));
    for (const auto& e : scenario("s2a.json").events) {
        s2.apply_contingency(e);
    }
    EXPECT_DOUBLE_EQ(s2.online_rating_mva(), 11520.0 - 2000.0);
    // A second trip of the same unit is a logged no-op.
    const auto n = s2.log().size();
    s2.apply_contingency(scenario("s2a.json").events.front());
    EXPECT_DOUBLE_EQ(s2.online_rating_mva(), 9520.0);
    EXPECT_GT(s2.log().size(), n);
}

TEST(Engine, SetPointsBalanceForecast) {
    Simulation sim(ieee39(), scenario("s1a.json"));
    double total = 0.0;
    for (double p : sim.setpoints_mw()) {
        total += p;
    }
    EXPECT_NEAR(total, ieee39().forecast_load_mw() - ieee39().wind_capacity_mw(), 1e-9);
    EXPECT_NEAR(sim.setpoints_mw()[3], 412.0, 0.5);
}

TEST(Engine, NoContingencyNoShedding) {
    auto sc = scenario("s2a.json");
    sc.events.clear();
    sc.duration = 200.0;
    const auto m = compute_metrics(run_scenario(ieee39(), sc));
    EXPECT_EQ(m.eens_mwh, 0.0);
    EXPECT_EQ(m.t_ls, 0.0);
    EXPECT_GT(m.nadir_hz, 59.5);
}

TEST(Engine, ContingencyTriggersSheddingAndRelayLog) {
    auto sc = scenario("s2a.json");
    sc.duration = 330.0;
    const auto tr = run_scenario(ieee39(), sc);
    const auto m = compute_metrics(tr);
    EXPECT_GT(m.eens_mwh, 0.0);
    ASSERT_FALSE(tr.relay_events.empty());
    EXPECT_GT(tr.relay_events.front().time, 300.0);
    EXPECT_LT(tr.relay_events.front().time, 305.0);
    for (const auto& e : tr.relay_events) {
        EXPECT_NE(e.old_level, e.new_level);
    }
    EXPECT_LE(m.r_ls, 0.5);
}

TEST(Engine, ScheduledTripOfUnknownGeneratorRejected) {
    auto sc = scenario("s1a.json");
    sc.events.front().generator = "G42";
    EXPECT_THROW(validate_scenario(ieee39(), sc), ConfigError);
}

TEST(Engine, TrajectoryColumnLookup) {
    Trajectory tr({"t", "x"});
    tr.add_row({0.0, 1.0});
    tr.add_row({0.1, 2.0});
    tr.add_row({0.2, 3.0});
    EXPECT_THROW(tr.index("y"), SchemaError);
    EXPECT_EQ(tr.slice(1, 3).column("x"), (std::vector<double>{2.0, 3.0}));
    EXPECT_THROW(tr.add_row({1.0}), std::exception);
}
