#include "gridfreq/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "gridfreq/error.hpp"

namespace gridfreq {

using nlohmann::json;

bool RunSummary::all_ok() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.ok; });
}

RunManifest load_manifest(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("manifest parse failure: {}", e.what()));
    }
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    RunManifest m;
    try {
        if (!j.contains("grid")) {
            throw ConfigError("manifest: missing 'grid'");
        }
        m.grid = resolve(j.at("grid").get<std::string>());
        for (const auto& s : j.value("scenarios", json::array())) {
            m.scenarios.push_back(resolve(s.get<std::string>()));
        }
        if (j.contains("output_dir")) {
            m.output_dir = resolve(j.at("output_dir").get<std::string>());
        }
        m.parallelism = j.value("parallelism", 1u);
        if (j.contains("seed") && !j.at("seed").is_null()) {
            m.seed = j.at("seed").get<std::uint64_t>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("manifest: {}", e.what()));
    }
    return m;
}

RunManifest load_manifest_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open manifest '{}'", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_manifest(ss.str(), path.parent_path());
}

PreparedRun prepare_run(const RunManifest& manifest) {
    if (manifest.scenarios.empty()) {
        throw ConfigError("manifest lists no scenarios");
    }
    if (manifest.parallelism == 0) {
        throw ConfigError("parallelism must be at least 1");
    }
    PreparedRun run{load_grid_config_file(manifest.grid), {}};
    std::set<std::string> names;
    for (const auto& path : manifest.scenarios) {
        auto sc = load_scenario_file(path);
        if (manifest.seed) {
            sc.seed = *manifest.seed;
        }
        try {
            validate_scenario(run.grid, sc);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
        }
        if (!names.insert(sc.name).second) {
            throw ConfigError(fmt::format("duplicate scenario name '{}'", sc.name));
        }
        run.scenarios.push_back(std::move(sc));
    }
    return run;
}

namespace {

ScenarioOutcome run_one(const GridModel& grid, const Scenario& sc, const std::filesystem::path& dir) {
    ScenarioOutcome o;
    o.name = sc.name;
    std::vector<std::string> log;
    try {
        Simulation sim(grid, sc);
        const auto tr = sim.run();
        o.metrics = compute_metrics(tr);
        export_results(tr, o.metrics, dir);
        log = tr.log;
        log.push_back(fmt::format("steps {} max solve residual {:.3e} pu max balance residual {:.3e} pu",
                                  tr.stats.steps, tr.stats.max_solve_residual_pu, tr.stats.max_balance_residual_pu));
        log.push_back(fmt::format("R_ls {} T_ls {} s EENS {} MWh nadir {} Hz", o.metrics.r_ls, o.metrics.t_ls,
                                  o.metrics.eens_mwh, o.metrics.nadir_hz));
        o.ok = true;
    } catch (const std::exception& e) {
        o.error = e.what();
        log.push_back(fmt::format("error: {}", e.what()));
    }
    try {
        std::filesystem::create_directories(dir);
        std::string text;
        for (const auto& line : log) {
            text += line + "\n";
        }
        write_text_file(dir / "run.log", text);
    } catch (const std::exception& e) {
        if (o.ok) {
            o.ok = false;
            o.error = e.what();
        }
    }
    return o;
}

}  // namespace

RunSummary run_prepared(const PreparedRun& run, const std::filesystem::path& output_dir, unsigned parallelism) {
    RunSummary summary;
    summary.outcomes.resize(run.scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < run.scenarios.size(); i = next++) {
            const auto& sc = run.scenarios[i];
            summary.outcomes[i] = run_one(run.grid, sc, output_dir / sc.name);
        }
    };
    const auto n = std::min<std::size_t>(std::max(1u, parallelism), run.scenarios.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t k = 1; k < n; ++k) {
            pool.emplace_back(worker);
        }
        worker();
    }

    // Pair A and B runs by group, in manifest order of first appearance.
    std::vector<std::string> order;
    std::map<std::string, std::pair<const ScenarioOutcome*, const ScenarioOutcome*>> groups;
    for (std::size_t i = 0; i < run.scenarios.size(); ++i) {
        const auto& sc = run.scenarios[i];
        const auto& o = summary.outcomes[i];
        if (sc.group.empty() || !o.ok) {
            continue;
        }
        auto [it, fresh] = groups.try_emplace(sc.group);
        if (fresh) {
            order.push_back(sc.group);
        }
        (sc.mode == CaseMode::A ? it->second.first : it->second.second) = &o;
    }
    for (const auto& g : order) {
        const auto& [a, b] = groups.at(g);
        if (a && b) {
            summary.comparisons.push_back(compare_cases(a->metrics, b->metrics));
        }
    }

    std::string text = format_comparison(summary.comparisons);
    for (const auto& o : summary.outcomes) {
        if (!o.ok) {
            text += fmt::format("FAILED {}: {}\n", o.name, o.error);
        }
    }
    std::string csv = "scenario,status,R_ls,T_ls_s,EENS_MWh,nadir_hz\n";
    for (const auto& o : summary.outcomes) {
        csv += fmt::format("{},{},{},{},{},{}\n", o.name, o.ok ? "ok" : "failed", o.metrics.r_ls, o.metrics.t_ls,
                           o.metrics.eens_mwh, o.metrics.nadir_hz);
    }
    std::filesystem::create_directories(output_dir);
    write_text_file(output_dir / "summary.txt", text);
    write_text_file(output_dir / "summary.csv", csv);
    write_text_file(output_dir / "comparison.csv", comparison_csv(summary.comparisons));
    return summary;
}

RunSummary run_manifest(const RunManifest& manifest) {
    const auto run = prepare_run(manifest);
    return run_prepared(run, manifest.output_dir.empty() ? std::filesystem::path("out") : manifest.output_dir,
                        manifest.parallelism);
}

}  // namespace gridfreq
