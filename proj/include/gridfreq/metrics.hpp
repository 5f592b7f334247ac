#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridfreq/engine.hpp"

namespace gridfreq {

inline constexpr int metrics_schema_version = 1;

struct ShedEvent {
    double trigger_time = 0.0;      // first sample with nonzero shed
    double clear_time = 0.0;        // first sample back at zero (or end of run)
    double peak_fraction = 0.0;
    double energy_mwh = 0.0;

    bool operator==(const ShedEvent&) const = default;
};

struct Metrics {
    std::string scenario;
    std::string case_mode;
    double r_ls = 0.0;              // max shed fraction
    double t_ls = 0.0;              // s
    double eens_mwh = 0.0;
    double nadir_hz = 0.0;
    std::vector<ShedEvent> events;

    bool operator==(const Metrics&) const = default;
};

/// Shed power per sample is sum_b (expected_b - served_b). Throws SchemaError
/// if no loadN_expected_mw channel is present.
Metrics compute_metrics(const Trajectory& tr);

struct CaseComparison {
    Metrics a;
    Metrics b;
    double eens_ratio = 0.0;        // a / b; 1 when both are zero
    double t_ls_ratio = 0.0;
    double r_ls_ratio = 0.0;
    double eens_reduction_pct = 0.0;
    double t_ls_reduction_pct = 0.0;
    double r_ls_reduction_pct = 0.0;
};

CaseComparison compare_cases(const Metrics& a, const Metrics& b);

/// Plain-text table in the layout of a scenario/case statistics table.
std::string format_comparison(const std::vector<CaseComparison>& rows);
std::string comparison_csv(const std::vector<CaseComparison>& rows);

std::string metrics_to_json(const Metrics& m);
/// Throws SchemaError naming the first missing or mistyped key.
Metrics metrics_from_json(const std::string& text);
Metrics read_metrics_file(const std::filesystem::path& path);

std::string trajectory_csv(const Trajectory& tr);
std::string events_csv(const Trajectory& tr, const Metrics& m);

/// Writes trajectory.csv, metrics.json and events.csv into dir.
void export_results(const Trajectory& tr, const Metrics& m, const std::filesystem::path& dir);

/// Writes text to path, throwing IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gridfreq
