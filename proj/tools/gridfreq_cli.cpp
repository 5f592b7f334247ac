#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include "CLI11.hpp"

#include "gridfreq/error.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/profile.hpp"
#include "gridfreq/rng.hpp"
#include "gridfreq/runner.hpp"

namespace fs = std::filesystem;
using namespace gridfreq;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_runtime = 3;

fs::path default_output_dir() {
    if (const char* env = std::getenv("GRIDFREQ_OUTPUT_DIR"); env && *env) {
        return env;
    }
    return "out";
}

RunManifest manifest_from_flags(const std::string& manifest_path, const std::string& grid,
                                const std::vector<std::string>& scenarios) {
    RunManifest m;
    if (!manifest_path.empty()) {
        m = load_manifest_file(manifest_path);
    }
    if (!grid.empty()) {
        m.grid = grid;
    }
    if (!scenarios.empty()) {
        m.scenarios.assign(scenarios.begin(), scenarios.end());
    }
    if (m.grid.empty()) {
        throw ConfigError("no grid config given (use --manifest or --grid)");
    }
    return m;
}

int cmd_run(const RunManifest& manifest) {
    const auto prepared = prepare_run(manifest);
    const auto summary = run_prepared(prepared, manifest.output_dir, manifest.parallelism);
    std::cout << format_comparison(summary.comparisons);
    for (const auto& o : summary.outcomes) {
        if (o.ok) {
            std::cout << fmt::format("{}: R_ls {:.4f} T_ls {:.1f} s EENS {:.4f} MWh nadir {:.4f} Hz\n", o.name,
                                     o.metrics.r_ls, o.metrics.t_ls, o.metrics.eens_mwh, o.metrics.nadir_hz);
        } else {
            std::cerr << fmt::format("{}: FAILED: {}\n", o.name, o.error);
        }
    }
    std::cout << fmt::format("artifacts in {}\n", manifest.output_dir.string());
    return summary.all_ok() ? exit_ok : exit_runtime;
}

struct SynthOptions {
    std::string input;
    bool synthetic = false;
    std::string kind = "wind";
    double rating = 1.0;
    double sigma = -1.0;
    std::uint64_t seed = 1;
    int bus = 0;
    std::size_t minutes = 11;
    std::string output;
};

int cmd_synth(const SynthOptions& o) {
    const bool wind = o.kind == "wind";
    if (!wind && o.kind != "load") {
        throw ConfigError(fmt::format("--kind must be wind or load, got '{}'", o.kind));
    }
    if (o.input.empty() == !o.synthetic) {
        throw ConfigError("give exactly one of --input or --synthetic");
    }
    MinuteSeries minutes;
    if (o.synthetic) {
        const WalkParams walk = wind ? WalkParams{0.92, 0.80, 1.0, 0.01} : WalkParams{1.0, 0.97, 1.03, 0.005};
        minutes = synthetic_minutes(o.minutes, walk,
                                    derive_seed(o.seed, static_cast<std::uint64_t>(o.bus),
                                                wind ? Stream::wind_minutes : Stream::load_minutes));
    } else {
        minutes = wind ? read_minute_csv(o.input, 0.0, 1.0) : read_minute_csv(o.input);
    }
    const double sigma = o.sigma >= 0.0 ? o.sigma : (wind ? 0.002 : 0.001);
    const NoiseParams noise{sigma, derive_seed(o.seed, static_cast<std::uint64_t>(o.bus),
                                               wind ? Stream::wind_seconds : Stream::load_seconds)};
    auto pu = wind ? resample_wind(minutes, noise) : resample_load(minutes, noise);
    auto series = wind ? scale_wind(pu, o.rating) : make_load_profile(pu, o.rating);
    series.bus = o.bus;
    const fs::path out = o.output.empty() ? default_output_dir() / fmt::format("{}_bus{}.csv", o.kind, o.bus)
                                          : fs::path(o.output);
    if (out.has_parent_path()) {
        fs::create_directories(out.parent_path());
    }
    write_second_csv(series, out);
    std::cout << fmt::format("wrote {} samples to {}\n", series.values.size(), out.string());
    return exit_ok;
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
    const auto a = read_metrics_file(a_path);
    const auto b = read_metrics_file(b_path);
    const auto c = compare_cases(a, b);
    std::cout << format_comparison({c});
    if (c.eens_ratio > 1.0 && std::isfinite(c.eens_ratio)) {
        std::cout << fmt::format("EENS of {} is about {:.1f}x that of {}\n", a.scenario, c.eens_ratio, b.scenario);
    }
    return exit_ok;
}

int cmd_validate(const RunManifest& manifest) {
    const auto prepared = prepare_run(manifest);
    std::cout << fmt::format("grid ok: {} buses, {} lines, {} generators\n", prepared.grid.buses.size(),
                             prepared.grid.lines.size(), prepared.grid.generator_count());
    for (const auto& sc : prepared.scenarios) {
        std::cout << fmt::format("scenario ok: {} (case {}, {} events, {} s)\n", sc.name, to_string(sc.mode),
                                 sc.events.size(), sc.duration);
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid frequency and load-shedding simulator"};
    app.require_subcommand(1);

    std::string manifest_path;
    std::string grid;
    std::vector<std::string> scenarios;
    std::string output_dir;
    unsigned jobs = 0;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run the scenarios of a manifest");
    run->add_option("-m,--manifest", manifest_path, "Run manifest (JSON)");
    run->add_option("-g,--grid", grid, "Grid config, overrides the manifest");
    run->add_option("-s,--scenario", scenarios, "Scenario files, override the manifest");
    run->add_option("-o,--output", output_dir, "Output directory");
    run->add_option("-j,--jobs", jobs, "Scenarios run concurrently");
    run->add_option("--seed", seed, "Master seed applied to every scenario");

    auto* validate = app.add_subcommand("validate", "Check a grid config and scenarios without running");
    validate->add_option("-m,--manifest", manifest_path, "Run manifest (JSON)");
    validate->add_option("-g,--grid", grid, "Grid config");
    validate->add_option("-s,--scenario", scenarios, "Scenario files");

    SynthOptions synth;
    auto* sp = app.add_subcommand("synth-profiles", "Resample a minute series to 1 s resolution");
    sp->add_option("-i,--input", synth.input, "Minute CSV (timestamp,value)");
    sp->add_flag("--synthetic", synth.synthetic, "Use the bundled bounded random walk instead of a CSV");
    sp->add_option("-k,--kind", synth.kind, "wind or load")->check(CLI::IsMember({"wind", "load"}));
    sp->add_option("-r,--rating", synth.rating, "Wind rating or load forecast, MW");
    sp->add_option("--sigma", synth.sigma, "Second-level increment std dev (p.u.)");
    sp->add_option("--seed", synth.seed, "Master seed");
    sp->add_option("--bus", synth.bus, "Bus id used for seed derivation and labelling");
    sp->add_option("--minutes", synth.minutes, "Minutes generated with --synthetic");
    sp->add_option("-o,--output", synth.output, "Output CSV path");

    std::string a_path;
    std::string b_path;
    auto* cmp = app.add_subcommand("compare", "Compare two metrics files (case A then case B)");
    cmp->add_option("a", a_path, "Metrics JSON of the reference case")->required();
    cmp->add_option("b", b_path, "Metrics JSON of the compared case")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_invalid;
    }

    try {
        if (*run || *validate) {
            auto m = manifest_from_flags(manifest_path, grid, scenarios);
            if (*validate) {
                return cmd_validate(m);
            }
            if (!output_dir.empty()) {
                m.output_dir = output_dir;
            } else if (m.output_dir.empty()) {
                m.output_dir = default_output_dir();
            }
            if (jobs > 0) {
                m.parallelism = jobs;
            }
            if (seed) {
                m.seed = seed;
            }
            return cmd_run(m);
        }
        if (*sp) {
            return cmd_synth(synth);
        }
        if (*cmp) {
            return cmd_compare(a_path, b_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_ok;
}
