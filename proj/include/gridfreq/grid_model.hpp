#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "gridfreq/machine.hpp"

namespace gridfreq {

struct GeneratorSpec {
    std::string id;
    GenType type = GenType::hydro;
    double rating_mva = 0.0;
    MachineParams params;
};

struct BusSpec {
    int id = 0;
    std::optional<GeneratorSpec> generator;
    std::optional<double> wind_mw;   // W^b, wind farm forecast / rating
    std::optional<double> load_mw;   // L^b, forecast load
    bool dispatched = false;         // dispatched-by-design bus (used in case B)
};

struct LineSpec {
    int from = 0;
    int to = 0;
    double susceptance = 0.0;        // p.u. on system base
};

/// Static network. Immutable once validated; shared read-only across runs.
struct GridModel {
    std::vector<BusSpec> buses;
    std::vector<LineSpec> lines;
    double base_mva = 100.0;
    double f0 = 60.0;
    int slack_bus = 31;
    std::optional<double> wind_total_mw;

    std::size_t bus_index(int bus_id) const;
    std::size_t generator_count() const;
    double wind_capacity_mw() const;
    double forecast_load_mw() const;
};

/// Parses and validates a grid config document (JSON text).
GridModel load_grid_config(const std::string& text);
GridModel load_grid_config_file(const std::filesystem::path& path);

/// Throws ConfigError naming the offending element on the first violation.
void validate_grid(const GridModel& model);

struct SusceptanceMatrix {
    Eigen::SparseMatrix<double> full;      // Laplacian over all buses, model order
    Eigen::SparseMatrix<double> reduced;   // slack row and column removed
    std::size_t slack_index = 0;
};

SusceptanceMatrix build_susceptance_matrix(const GridModel& model);

struct DcFlowResult {
    std::vector<double> angles;      // rad, model bus order, slack = 0
    double slack_injection_pu = 0.0; // what the slack absorbs to balance
};

/// Solves B theta = P with P in p.u. (one entry per bus, model order).
/// Throws IslandingError when the reduced matrix is singular.
DcFlowResult solve_dc_flow(const SusceptanceMatrix& b, const std::vector<double>& injections_pu);

/// Flow from line.from to line.to in p.u.
double line_flow(const GridModel& model, const LineSpec& line, const std::vector<double>& angles);

void write_matrix_csv(const Eigen::SparseMatrix<double>& m, const std::filesystem::path& path);

}  // namespace gridfreq
