// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Tolerances are fixed here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gridfreq/engine.hpp"
#include "gridfreq/metrics.hpp"
#include "gridfreq/profile.hpp"
#include "gridfreq/protection.hpp"
#include "gridfreq/scenario.hpp"

using namespace gridfreq;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = GRIDFREQ_DATA_DIR;

constexpr double droop_rel_tol = 0.01;
constexpr double droop_max_s = 5.0;
constexpr int ufls_traces = 1000;
constexpr int resample_seeds = 1000;
constexpr double resample_max_s = 10.0;
constexpr double dispatch_tol_mw = 1e-9;
constexpr double metrics_rel_tol = 1e-9;
constexpr int paired_seeds = 10;
constexpr double four_scenarios_max_s = 120.0;
constexpr double halving_tol_hz = 1e-3;
constexpr double drift_tol_pu = 1e-6;
constexpr double residual_tol_pu = 1e-9;

struct Result {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const GridModel& ieee39() {
    static const GridModel m = load_grid_config_file(data_dir / "ieee39.json");
    return m;
}

Scenario bundled(const std::string& file) {
    return load_scenario_file(data_dir / "scenarios" / file);
}

double column_min(const Trajectory& tr, const std::string& name) {
    const auto v = tr.column(name);
    return *std::min_element(v.begin(), v.end());
}

Result droop_law() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = load_grid_config_file(data_dir / "single_area.json");
    const auto sc = load_scenario_file(data_dir / "scenarios" / "droop_step.json");
    const auto tr = run_scenario(grid, sc);
    const double elapsed = seconds_since(t0);

    double step_mw = 0.0;
    for (const auto& e : sc.events) {
        step_mw += e.delta_mw;
    }
    double stiffness = 0.0;  // sum of P_base / R in MW per p.u. speed
    for (const auto& b : grid.buses) {
        if (b.generator) {
            stiffness += b.generator->rating_mva / 0.05;
        }
    }
    const double expected = -step_mw / stiffness * grid.f0;
    const double got = tr.column("f_coi_hz").back() - grid.f0;
    const double err = std::abs(got / expected - 1.0);
    return {err < droop_rel_tol && elapsed < droop_max_s && !sc.ufls_enabled,
            fmt::format("df {:.6f} Hz vs {:.6f} Hz (rel err {:.2e}), {:.2f} s", got, expected, err, elapsed)};
}

// Relay written straight from the staircase table.
struct ReferenceRelay {
    double level = 0.0;
    double pending = -1.0;
    int count = 0;

    static double shed(double drop) {
        if (drop <= 1.0) return 0.0;
        if (drop < 1.2) return 0.05;
        if (drop < 1.4) return 0.15;
        if (drop < 1.6) return 0.25;
        if (drop < 1.8) return 0.35;
        if (drop < 2.0) return 0.45;
        return 0.50;
    }

    void feed(double f) {
        const double drop = 60.0 - f;
        double target = level;
        if (drop > 1.0) {
            target = std::max(level, shed(drop));
        } else if (drop <= 0.25) {
            target = 0.0;
        } else if (drop <= 0.5) {
            target = std::min(level, 0.05);
        } else if (drop <= 0.75) {
            target = std::min(level, 0.15);
        }
        if (target == level) {
            pending = -1.0;
            count = 0;
            return;
        }
        count = target == pending ? count + 1 : 1;
        pending = target;
        if (count >= 15) {
            level = target;
            pending = -1.0;
            count = 0;
        }
    }
};

Result ufls_exactness() {
    constexpr double dt = 0.01;
    int violations = 0;
    auto relay = [] {
        UflsRelayState r;
        r.f0 = 60.0;
        return r;
    };
    // Each shed step from rest, committed on the 15th sample.
    const std::pair<double, double> steps[] = {{58.95, 0.05}, {58.75, 0.15}, {58.55, 0.25},
                                               {58.35, 0.35}, {58.15, 0.45}, {57.9, 0.50}};
    for (const auto& [f, level] : steps) {
        auto r = relay();
        for (int k = 1; k <= 15; ++k) {
            r = ufls_step(r, f, dt);
            if ((k < 15 && r.level != 0.0) || (k == 15 && r.level != level)) {
                ++violations;
            }
        }
    }
    // Restoration thresholds 59.25 / 59.5 / 59.75 Hz starting from 25% shed.
    const std::pair<double, double> restore[] = {{59.3, 0.15}, {59.6, 0.05}, {59.8, 0.0}};
    auto r = relay();
    r.level = r.candidate = 0.25;
    for (const auto& [f, level] : restore) {
        const double before = r.level;
        for (int k = 1; k <= 15; ++k) {
            r = ufls_step(r, f, dt);
            if ((k < 15 && r.level != before) || (k == 15 && r.level != level)) {
                ++violations;
            }
        }
    }
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> band(57.6, 60.2);
    std::uniform_int_distribution<int> len(1, 40);
    std::normal_distribution<double> jitter(0.0, 0.02);
    long samples = 0;
    for (int trace = 0; trace < ufls_traces; ++trace) {
        auto lib = relay();
        ReferenceRelay ref;
        for (int seg = 0; seg < 60; ++seg) {
            const double base = band(rng);
            const int n = len(rng);
            for (int k = 0; k < n; ++k) {
                const double f = base + (trace % 2 ? jitter(rng) : 0.0);
                lib = ufls_step(lib, f, dt);
                ref.feed(f);
                violations += lib.level != ref.level;
                ++samples;
            }
        }
    }
    return {violations == 0, fmt::format("{} traces, {} samples, {} violations", ufls_traces, samples, violations)};
}

Result resampler() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    const MinuteSeries x{{0.55, 0.8, 0.62, 0.9, 0.9, 0.31, 0.5}};
    const auto exact = resample_wind(x, {0.0, 11});
    int boundary_misses = 0;
    for (std::size_t t = 0; t < x.values.size(); ++t) {
        boundary_misses += exact.values[t * 60] != x.values[t];
    }
    ok &= boundary_misses == 0;

    constexpr double sigma = 0.001;
    const std::size_t minutes = x.values.size() - 1;
    std::vector<double> mean(minutes, 0.0);
    for (int seed = 0; seed < resample_seeds; ++seed) {
        const auto inc = draw_increments(x, {sigma, static_cast<std::uint64_t>(seed)});
        for (std::size_t t = 0; t < minutes; ++t) {
            double s = 0.0;
            for (std::size_t k = 0; k < 60; ++k) {
                s += inc[t * 60 + k];
            }
            mean[t] += s / resample_seeds;
        }
    }
    const double band = 3.0 * std::sqrt(60.0) * sigma / std::sqrt(static_cast<double>(resample_seeds));
    double worst = 0.0;
    for (std::size_t t = 0; t < minutes; ++t) {
        worst = std::max(worst, std::abs(mean[t] - (x.values[t + 1] - x.values[t])) / band);
    }
    ok &= worst < 1.0;

    const auto a = resample_wind(x, {0.002, 99});
    const auto b = resample_wind(x, {0.002, 99});
    const bool identical = a.values.size() == b.values.size() &&
                           std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
    ok &= identical;
    const double elapsed = seconds_since(t0);
    ok &= elapsed < resample_max_s;
    return {ok, fmt::format("boundary misses {}, worst mean offset {:.2f} of 3-sigma band, bit-identical {}, {:.2f} s",
                            boundary_misses, worst, identical ? "yes" : "no", elapsed)};
}

Result ideal_dispatch() {
    auto sc = bundled("s2b.json");
    sc.dispatch.mode = DispatchErrorMode::ideal;
    sc.output_interval = 1.0;
    const auto tr = run_scenario(ieee39(), sc);
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& bus : ieee39().buses) {
        if (!bus.dispatched) {
            continue;
        }
        const double schedule = bus.wind_mw.value_or(0.0) - bus.load_mw.value_or(0.0);
        for (double v : tr.column(fmt::format("net{}_mw", bus.id))) {
            worst = std::max(worst, std::abs(v - schedule));
            ++checked;
        }
    }
    const bool full = checked == tr.rows() * 21 && tr.rows() == 601;
    return {full && worst <= dispatch_tol_mw,
            fmt::format("{} bus-seconds, max |net - schedule| {:.3e} MW", checked, worst)};
}

Result metrics_oracles() {
    Trajectory tr({"t", "f_coi_hz", "load1_expected_mw", "load1_served_mw", "load2_expected_mw", "load2_served_mw"});
    // Two rectangular pulses (25 MW x 150 samples, 90 MW x 40 samples) and a
    // ramp-down tail, on a 0.1 s grid. Pulses are split 1:4 between loads.
    const double h = 0.1;
    auto shed = [](int r) {
        if (r >= 100 && r < 250) return 25.0;
        if (r >= 600 && r < 640) return 90.0;
        if (r >= 640 && r < 649) return 90.0 - 9.0 * (r - 639);
        return 0.0;
    };
    double rect = 0.0;
    int nonzero = 0;
    double peak = 0.0;
    for (int r = 0; r < 1000; ++r) {
        const double s = shed(r);
        tr.add_row({r * h, 60.0, 200.0, 200.0 - 0.2 * s, 400.0, 400.0 - 0.8 * s});
        rect += s * h;
        nonzero += s > 0.0;
        peak = std::max(peak, s / 600.0);
    }
    const auto m = compute_metrics(tr);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const double e_eens = rel(m.eens_mwh, rect / 3600.0);
    const double e_tls = rel(m.t_ls, nonzero * h);
    const double e_rls = rel(m.r_ls, peak);
    double e_split = 0.0;
    for (std::size_t k : {1u, 120u, 620u, 645u, 998u}) {
        const double parts =
            compute_metrics(tr.slice(0, k + 1)).eens_mwh + compute_metrics(tr.slice(k, tr.rows())).eens_mwh;
        e_split = std::max(e_split, rel(parts, m.eens_mwh));
    }
    const double worst = std::max({e_eens, e_tls, e_rls, e_split});
    return {worst < metrics_rel_tol, fmt::format("EENS {:.2e}, T_ls {:.2e}, R_ls {:.2e}, split {:.2e} relative",
                                                 e_eens, e_tls, e_rls, e_split)};
}

Result paired_cases() {
    int fails = 0;
    double slowest = 0.0;
    std::string first_fail;
    double eens_a_sum[2] = {0, 0}, eens_b_sum[2] = {0, 0};
    for (int seed = 1; seed <= paired_seeds; ++seed) {
        const auto t0 = std::chrono::steady_clock::now();
        Metrics m[2][2];  // [scenario][case]
        const char* files[2][2] = {{"s1a.json", "s1b.json"}, {"s2a.json", "s2b.json"}};
        for (int s = 0; s < 2; ++s) {
            for (int c = 0; c < 2; ++c) {
                auto sc = bundled(files[s][c]);
                sc.seed = static_cast<std::uint64_t>(seed);
                m[s][c] = compute_metrics(run_scenario(ieee39(), sc));
            }
        }
        slowest = std::max(slowest, seconds_since(t0));
        std::vector<std::string> bad;
        for (int s = 0; s < 2; ++s) {
            for (int c = 0; c < 2; ++c) {
                if (!(m[s][c].eens_mwh > 0.0)) bad.push_back(fmt::format("S{}{} no shedding", s + 1, "AB"[c]));
            }
        }
        for (int c = 0; c < 2; ++c) {
            const auto& s1 = m[0][c];
            const auto& s2 = m[1][c];
            if (!(s2.nadir_hz < s1.nadir_hz)) bad.push_back(fmt::format("nadir {}", "AB"[c]));
            if (!(s2.t_ls > s1.t_ls)) bad.push_back(fmt::format("T_ls S2 vs S1 {}", "AB"[c]));
            if (!(s2.eens_mwh > s1.eens_mwh)) bad.push_back(fmt::format("EENS S2 vs S1 {}", "AB"[c]));
        }
        for (int s = 0; s < 2; ++s) {
            const auto& a = m[s][0];
            const auto& b = m[s][1];
            if (!(b.eens_mwh < a.eens_mwh)) bad.push_back(fmt::format("EENS B vs A S{}", s + 1));
            if (!(b.t_ls <= a.t_ls)) bad.push_back(fmt::format("T_ls B vs A S{}", s + 1));
            eens_a_sum[s] += a.eens_mwh;
            eens_b_sum[s] += b.eens_mwh;
        }
        if (!bad.empty()) {
            ++fails;
            if (first_fail.empty()) {
                first_fail = fmt::format("; seed {}: {}", seed, bad.front());
            }
        }
    }
    const bool ok = fails == 0 && slowest < four_scenarios_max_s;
    return {ok, fmt::format("{} of {} seeds consistent, mean EENS ratio A/B S1 {:.2f} S2 {:.2f}, "
                            "slowest four-scenario set {:.1f} s{}",
                            paired_seeds - fails, paired_seeds, eens_a_sum[0] / eens_b_sum[0],
                            eens_a_sum[1] / eens_b_sum[1], slowest, first_fail)};
}

Result numerics() {
    // Step halving on the larger trip, relays off and deterministic profiles.
    auto sc = bundled("s2a.json");
    sc.ufls_enabled = false;
    sc.profiles.wind_source = ProfileSource::constant;
    sc.profiles.load_source = ProfileSource::constant;
    const auto coarse = run_scenario(ieee39(), sc);
    auto half = sc;
    half.dt = sc.dt / 2.0;
    const auto fine = run_scenario(ieee39(), half);
    const double dn = std::abs(column_min(coarse, "f_coi_hz") - column_min(fine, "f_coi_hz"));

    auto quiet = sc;
    quiet.events.clear();
    const auto flat = run_scenario(ieee39(), quiet);
    double drift = 0.0;
    for (const auto& c : flat.columns()) {
        if (c.size() > 6 && c.compare(c.size() - 6, 6, "_dw_pu") == 0) {
            for (double v : flat.column(c)) {
                drift = std::max(drift, std::abs(v));
            }
        }
    }

    const auto live = run_scenario(ieee39(), bundled("s2a.json"));
    double residual = 0.0;
    for (const auto* t : {&coarse, &fine, &flat, &live}) {
        residual = std::max({residual, t->stats.max_solve_residual_pu, t->stats.max_balance_residual_pu});
    }
    return {dn < halving_tol_hz && drift < drift_tol_pu && residual < residual_tol_pu,
            fmt::format("nadir shift {:.2e} Hz, drift {:.2e} pu over {} s, max DC residual {:.2e} pu", dn, drift,
                        quiet.duration, residual)};
}

Result determinism() {
    std::size_t bytes = 0;
    bool same = true;
    for (const char* f : {"s1a.json", "s2b.json"}) {
        const auto sc = bundled(f);
        const auto a = run_scenario(ieee39(), sc);
        const auto b = run_scenario(ieee39(), sc);
        const auto ta = trajectory_csv(a);
        const auto ma = metrics_to_json(compute_metrics(a));
        same &= ta == trajectory_csv(b) && ma == metrics_to_json(compute_metrics(b)) &&
                events_csv(a, compute_metrics(a)) == events_csv(b, compute_metrics(b));
        bytes += ta.size() + ma.size();
    }
    return {same, fmt::format("{} bytes compared across two scenarios", bytes)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Result()>> criteria[] = {
        {"droop law steady state", droop_law},
        {"UFLS staircase, restoration and delay", ufls_exactness},
        {"second-level resampler", resampler},
        {"ideal dispatch holds schedule", ideal_dispatch},
        {"metrics oracles and additivity", metrics_oracles},
        {"39-bus scenario ordering across seeds", paired_cases},
        {"step halving, drift and DC residual", numerics},
        {"byte-identical reruns", determinism},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, check] : criteria) {
        ++n;
        Result r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r = {false, fmt::format("exception: {}", e.what())};
        }
        failed += !r.pass;
        fmt::print("[{}] {}: {} ({})\n", n, name, r.pass ? "PASS" : "FAIL", r.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
