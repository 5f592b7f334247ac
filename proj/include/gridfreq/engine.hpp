#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridfreq/dispatch.hpp"
#include "gridfreq/grid_model.hpp"
#include "gridfreq/machine.hpp"
#include "gridfreq/network.hpp"
#include "gridfreq/profile.hpp"
#include "gridfreq/protection.hpp"
#include "gridfreq/scenario.hpp"

namespace gridfreq {

struct RelayEvent {
    int bus = 0;
    double time = 0.0;
    double old_level = 0.0;
    double new_level = 0.0;
};

struct RunStats {
    std::uint64_t steps = 0;
    double max_solve_residual_pu = 0.0;
    double max_balance_residual_pu = 0.0;
    std::uint64_t gate_floor_hits = 0;
};

/// Column table on a uniform time grid. Column "t" is time in seconds;
/// other channels are named <kind><id>_<quantity>, e.g. load3_expected_mw.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return columns_.empty() ? 0 : data_.size() / columns_.size(); }
    std::optional<std::size_t> find(const std::string& column) const;
    /// Throws SchemaError if the column is missing.
    std::size_t index(const std::string& column) const;
    double at(std::size_t row, std::size_t col) const { return data_[row * columns_.size() + col]; }
    std::vector<double> column(const std::string& name) const;
    void add_row(const std::vector<double>& row);
    /// Rows [first, last) as a new trajectory (events and log not copied).
    Trajectory slice(std::size_t first, std::size_t last) const;

    std::string scenario;
    CaseMode mode = CaseMode::A;
    double f0 = 60.0;
    std::vector<RelayEvent> relay_events;
    std::vector<std::string> log;
    RunStats stats;

private:
    std::vector<std::string> columns_;
    std::vector<double> data_;
};

/// Per-bus 1 s injections for one run. Case A and case B runs with the same
/// seed share wind and load realizations; batteries are case-B only.
struct ProfileSet {
    std::map<int, SecondSeries> wind;      // MW
    std::map<int, SecondSeries> load;      // MW
    std::map<int, BatterySeries> battery;  // MW
    std::size_t seconds = 0;
};

ProfileSet build_profiles(const GridModel& model, const Scenario& sc);

/// FNV-1a over the wind and load sample bits, for seed-pairing checks.
std::uint64_t profile_hash(const ProfileSet& p);

struct SystemState {
    std::vector<MachineState> machines;
    std::vector<UflsRelayState> relays;
    std::vector<FrequencyEstimator> estimators;  // one per bus
    std::vector<double> bus_frequency;           // Hz, latest estimates
    Eigen::VectorXd bus_angles;
    std::vector<double> load_offset_mw;          // accumulated load steps per bus
    std::uint64_t step = 0;
    double time = 0.0;
};

/// Fixed-step integration of one scenario on one grid.
class Simulation {
public:
    Simulation(const GridModel& model, const Scenario& scenario);
    Simulation(const GridModel& model, const Scenario& scenario, ProfileSet profiles);

    const SystemState& state() const { return state_; }
    const ProfileSet& profiles() const { return profiles_; }
    const std::vector<std::string>& generator_ids() const { return gen_ids_; }
    const std::vector<double>& setpoints_mw() const { return setpoint_mw_; }

    /// Advances the state from t to t + dt.
    void step();

    /// Applies an event now. Tripping an offline machine logs a warning.
    void apply_contingency(const ContingencyEvent& event);

    /// Runs the whole horizon, applying scheduled events.
    Trajectory run();

    double coi_frequency() const;
    double online_rating_mva() const;
    const RunStats& stats() const { return stats_; }
    const std::vector<std::string>& log() const { return log_; }
    const std::vector<RelayEvent>& relay_events() const { return relay_events_; }

private:
    struct BusInjection {
        double wind = 0.0;
        double load = 0.0;           // unshed demand
        double served = 0.0;
        double battery = 0.0;
        double battery_ideal = 0.0;
        double eps = 0.0;
    };

    void initialize();
    void refresh_injections();
    Eigen::VectorXd machine_power_pu(const Eigen::VectorXd& delta) const;  // machine base
    std::vector<std::string> make_columns() const;
    std::vector<double> make_row(const Eigen::VectorXd& pe_mb) const;

    const GridModel& model_;
    Scenario scenario_;
    ProfileSet profiles_;
    std::vector<std::size_t> gen_bus_;           // bus index per machine
    std::vector<const GeneratorSpec*> gens_;
    std::vector<std::string> gen_ids_;
    std::vector<double> setpoint_mw_;
    std::vector<std::size_t> load_buses_;        // bus indices with a relay
    std::vector<std::optional<SteamTurbineStep>> steam_steps_;
    std::vector<std::optional<HydroServoStep>> hydro_servo_;
    std::optional<CoupledNetwork> network_;
    std::vector<BusInjection> inj_;
    Eigen::VectorXd inj_pu_;
    SystemState state_;
    RunStats stats_;
    std::vector<std::string> log_;
    std::vector<RelayEvent> relay_events_;
    double omega_s_ = 0.0;
};

Trajectory run_scenario(const GridModel& model, const Scenario& sc);

}  // namespace gridfreq
