#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridfreq/metrics.hpp"
#include "gridfreq/scenario.hpp"

namespace gridfreq {

struct RunManifest {
    std::filesystem::path grid;
    std::vector<std::filesystem::path> scenarios;
    std::filesystem::path output_dir;
    unsigned parallelism = 1;
    std::optional<std::uint64_t> seed;  // overrides every scenario seed when set
};

/// Relative paths resolve against base_dir.
RunManifest load_manifest(const std::string& text, const std::filesystem::path& base_dir = {});
RunManifest load_manifest_file(const std::filesystem::path& path);

struct PreparedRun {
    GridModel grid;
    std::vector<Scenario> scenarios;
};

/// Loads and validates everything a manifest refers to. Throws ConfigError
/// before any simulation starts.
PreparedRun prepare_run(const RunManifest& manifest);

struct ScenarioOutcome {
    std::string name;
    bool ok = false;
    std::string error;
    Metrics metrics;
};

struct RunSummary {
    std::vector<ScenarioOutcome> outcomes;   // manifest order
    std::vector<CaseComparison> comparisons; // one per group with an A and a B run
    bool all_ok() const;
};

/// Runs every scenario on a bounded pool, writes <output_dir>/<name>/{trajectory.csv,
/// metrics.json, events.csv, run.log} and summary.txt / summary.csv.
RunSummary run_prepared(const PreparedRun& run, const std::filesystem::path& output_dir, unsigned parallelism);

RunSummary run_manifest(const RunManifest& manifest);

}  // namespace gridfreq
