#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridfreq/dispatch.hpp"
#include "gridfreq/grid_model.hpp"
#include "gridfreq/profile.hpp"
#include "gridfreq/protection.hpp"

namespace gridfreq {

/// A: buses inject their stochastic realizations.
/// B: dispatched buses add battery power that tracks their schedule.
enum class CaseMode { A, B };

std::string to_string(CaseMode mode);

struct ContingencyEvent {
    enum class Kind { trip, load_step };
    Kind kind = Kind::trip;
    double time = 0.0;
    std::string generator;           // trip
    int bus = 0;                     // load_step
    double delta_mw = 0.0;           // load_step, added to the bus demand
};

enum class ProfileSource { synthetic, constant, csv };

struct ProfileSettings {
    ProfileSource wind_source = ProfileSource::synthetic;
    ProfileSource load_source = ProfileSource::synthetic;
    WalkParams wind_walk{0.92, 0.80, 1.0, 0.01};
    WalkParams load_walk{1.0, 0.97, 1.03, 0.005};
    double wind_sigma = 0.002;
    double load_sigma = 0.001;
    double wind_constant = 1.0;      // p.u., constant source
    double load_constant = 1.0;
    std::map<int, std::filesystem::path> wind_csv;   // bus -> minute CSV
    std::map<int, std::filesystem::path> load_csv;
};

enum class DispatchErrorMode { ideal, placeholder, csv };

struct DispatchSettings {
    DispatchErrorMode mode = DispatchErrorMode::placeholder;
    std::filesystem::path cdf_path;
    BatteryOptions battery;
};

struct Scenario {
    std::string name = "scenario";
    std::string group;               // scenarios sharing a group are compared A vs B
    CaseMode mode = CaseMode::A;
    std::vector<ContingencyEvent> events;
    double duration = 600.0;
    double dt = 0.01;
    std::uint64_t seed = 1;
    double output_interval = 0.1;
    bool ufls_enabled = true;
    UflsScheme ufls;
    double estimator_time_constant = 0.05;
    ProfileSettings profiles;
    DispatchSettings dispatch;
};

/// Parses a scenario document (JSON). Relative CSV paths resolve against base_dir.
Scenario load_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario_file(const std::filesystem::path& path);

/// Cross-checks the scenario against the grid it will run on.
void validate_scenario(const GridModel& model, const Scenario& sc);

}  // namespace gridfreq
