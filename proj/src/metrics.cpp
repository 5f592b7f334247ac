#include "gridfreq/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "gridfreq/error.hpp"

namespace gridfreq {

using nlohmann::json;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

double ratio(double a, double b) {
    if (b == 0.0) {
        return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return a / b;
}

double reduction_pct(double a, double b) {
    return a == 0.0 ? 0.0 : 100.0 * (a - b) / a;
}

}  // namespace

Metrics compute_metrics(const Trajectory& tr) {
    std::vector<std::pair<std::size_t, std::size_t>> loads;  // expected, served
    for (const auto& c : tr.columns()) {
        if (c.rfind("load", 0) == 0 && ends_with(c, "_expected_mw")) {
            const std::string stem = c.substr(0, c.size() - std::string("_expected_mw").size());
            loads.emplace_back(tr.index(c), tr.index(stem + "_served_mw"));
        }
    }
    if (loads.empty()) {
        throw SchemaError("trajectory has no expected-load channel (loadN_expected_mw)");
    }
    const auto ti = tr.index("t");

    Metrics m;
    m.scenario = tr.scenario;
    m.case_mode = to_string(tr.mode);
    const auto rows = tr.rows();
    if (rows == 0) {
        return m;
    }
    std::vector<double> shed(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double expected = 0.0;
        for (const auto& [e, s] : loads) {
            expected += tr.at(r, e);
            shed[r] += tr.at(r, e) - tr.at(r, s);
        }
        if (expected > 0.0) {
            m.r_ls = std::max(m.r_ls, shed[r] / expected);
        }
    }
    const double step = rows > 1 ? tr.at(1, ti) - tr.at(0, ti) : 0.0;

    double energy_mws = 0.0;
    for (std::size_t r = 0; r + 1 < rows; ++r) {
        energy_mws += 0.5 * (shed[r] + shed[r + 1]) * (tr.at(r + 1, ti) - tr.at(r, ti));
    }
    m.eens_mwh = energy_mws / 3600.0;

    std::size_t count = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (shed[r] > 0.0) {
            ++count;
        }
    }
    m.t_ls = static_cast<double>(count) * step;

    // Events: maximal runs of nonzero shed. Energy includes the trapezoid
    // edges on both sides so that event energies sum to the total.
    for (std::size_t r = 0; r < rows;) {
        if (!(shed[r] > 0.0)) {
            ++r;
            continue;
        }
        const std::size_t first = r;
        while (r < rows && shed[r] > 0.0) {
            ++r;
        }
        ShedEvent ev;
        ev.trigger_time = tr.at(first, ti);
        ev.clear_time = r < rows ? tr.at(r, ti) : tr.at(rows - 1, ti) + step;
        const std::size_t lo = first > 0 ? first - 1 : first;
        const std::size_t hi = r < rows ? r : rows - 1;
        double e = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
            e += 0.5 * (shed[k] + shed[k + 1]) * (tr.at(k + 1, ti) - tr.at(k, ti));
        }
        ev.energy_mwh = e / 3600.0;
        for (std::size_t k = first; k < r; ++k) {
            double expected = 0.0;
            for (const auto& [ei, si] : loads) {
                expected += tr.at(k, ei);
            }
            if (expected > 0.0) {
                ev.peak_fraction = std::max(ev.peak_fraction, shed[k] / expected);
            }
        }
        m.events.push_back(ev);
    }

    if (auto fi = tr.find("f_coi_hz")) {
        m.nadir_hz = tr.at(0, *fi);
        for (std::size_t r = 1; r < rows; ++r) {
            m.nadir_hz = std::min(m.nadir_hz, tr.at(r, *fi));
        }
    }
    return m;
}

CaseComparison compare_cases(const Metrics& a, const Metrics& b) {
    CaseComparison c{a, b};
    c.eens_ratio = ratio(a.eens_mwh, b.eens_mwh);
    c.t_ls_ratio = ratio(a.t_ls, b.t_ls);
    c.r_ls_ratio = ratio(a.r_ls, b.r_ls);
    c.eens_reduction_pct = reduction_pct(a.eens_mwh, b.eens_mwh);
    c.t_ls_reduction_pct = reduction_pct(a.t_ls, b.t_ls);
    c.r_ls_reduction_pct = reduction_pct(a.r_ls, b.r_ls);
    return c;
}

std::string format_comparison(const std::vector<CaseComparison>& rows) {
    std::string out = fmt::format("{:<16} {:>4} {:>8} {:>10} {:>11} {:>11}\n", "scenario", "case", "R_ls %",
                                  "T_ls s", "EENS MWh", "nadir Hz");
    for (const auto& c : rows) {
        for (const Metrics* m : {&c.a, &c.b}) {
            out += fmt::format("{:<16} {:>4} {:>8.2f} {:>10.1f} {:>11.3f} {:>11.4f}\n", m->scenario, m->case_mode,
                               100.0 * m->r_ls, m->t_ls, m->eens_mwh, m->nadir_hz);
        }
        out += fmt::format("  {} vs {}: EENS ratio {:.2f} ({:.1f}% lower), T_ls ratio {:.2f} ({:.1f}% shorter), "
                           "R_ls ratio {:.2f}\n",
                           c.a.scenario, c.b.scenario, c.eens_ratio, c.eens_reduction_pct, c.t_ls_ratio,
                           c.t_ls_reduction_pct, c.r_ls_ratio);
    }
    return out;
}

std::string comparison_csv(const std::vector<CaseComparison>& rows) {
    std::string out =
        "scenario_a,scenario_b,r_ls_a,r_ls_b,t_ls_a_s,t_ls_b_s,eens_a_mwh,eens_b_mwh,nadir_a_hz,nadir_b_hz,"
        "eens_ratio,t_ls_ratio,r_ls_ratio,eens_reduction_pct,t_ls_reduction_pct,r_ls_reduction_pct\n";
    for (const auto& c : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", c.a.scenario, c.b.scenario, c.a.r_ls,
                           c.b.r_ls, c.a.t_ls, c.b.t_ls, c.a.eens_mwh, c.b.eens_mwh, c.a.nadir_hz, c.b.nadir_hz,
                           c.eens_ratio, c.t_ls_ratio, c.r_ls_ratio, c.eens_reduction_pct, c.t_ls_reduction_pct,
                           c.r_ls_reduction_pct);
    }
    return out;
}

std::string metrics_to_json(const Metrics& m) {
    json j;
    j["schema_version"] = metrics_schema_version;
    j["scenario"] = m.scenario;
    j["case"] = m.case_mode;
    j["R_ls"] = m.r_ls;
    j["T_ls"] = m.t_ls;
    j["EENS"] = m.eens_mwh;
    j["nadir_hz"] = m.nadir_hz;
    j["units"] = {{"R_ls", "fraction"}, {"T_ls", "s"}, {"EENS", "MWh"}, {"nadir_hz", "Hz"}};
    j["events"] = json::array();
    for (const auto& e : m.events) {
        j["events"].push_back({{"trigger_time", e.trigger_time},
                               {"clear_time", e.clear_time},
                               {"peak_fraction", e.peak_fraction},
                               {"energy_mwh", e.energy_mwh}});
    }
    return j.dump(2) + "\n";
}

namespace {

const json& require(const json& j, const char* key, json::value_t type, const std::string& where = "") {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(fmt::format("metrics: missing key '{}{}'", where, key));
    }
    const bool ok = type == json::value_t::number_float ? it->is_number() : it->type() == type;
    if (!ok) {
        throw SchemaError(fmt::format("metrics: key '{}{}' has the wrong type", where, key));
    }
    return *it;
}

}  // namespace

Metrics metrics_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(fmt::format("metrics: not valid JSON: {}", e.what()));
    }
    if (!j.is_object()) {
        throw SchemaError("metrics: top level must be an object");
    }
    const auto version = require(j, "schema_version", json::value_t::number_float).get<int>();
    if (version != metrics_schema_version) {
        throw SchemaError(fmt::format("metrics: schema_version {} not supported (expected {})", version,
                                      metrics_schema_version));
    }
    Metrics m;
    m.scenario = require(j, "scenario", json::value_t::string).get<std::string>();
    m.case_mode = require(j, "case", json::value_t::string).get<std::string>();
    m.r_ls = require(j, "R_ls", json::value_t::number_float).get<double>();
    m.t_ls = require(j, "T_ls", json::value_t::number_float).get<double>();
    m.eens_mwh = require(j, "EENS", json::value_t::number_float).get<double>();
    m.nadir_hz = require(j, "nadir_hz", json::value_t::number_float).get<double>();
    const auto& events = require(j, "events", json::value_t::array);
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto where = fmt::format("events[{}].", i);
        ShedEvent e;
        e.trigger_time = require(events[i], "trigger_time", json::value_t::number_float, where).get<double>();
        e.clear_time = require(events[i], "clear_time", json::value_t::number_float, where).get<double>();
        e.peak_fraction = require(events[i], "peak_fraction", json::value_t::number_float, where).get<double>();
        e.energy_mwh = require(events[i], "energy_mwh", json::value_t::number_float, where).get<double>();
        m.events.push_back(e);
    }
    return m;
}

Metrics read_metrics_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open metrics file '{}'", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return metrics_from_json(ss.str());
    } catch (const SchemaError& e) {
        throw SchemaError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string trajectory_csv(const Trajectory& tr) {
    fmt::memory_buffer buf;
    const auto& cols = tr.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        fmt::format_to(std::back_inserter(buf), "{}{}", c ? "," : "", cols[c]);
    }
    buf.push_back('\n');
    for (std::size_t r = 0; r < tr.rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            fmt::format_to(std::back_inserter(buf), "{}{}", c ? "," : "", tr.at(r, c));
        }
        buf.push_back('\n');
    }
    return fmt::to_string(buf);
}

std::string events_csv(const Trajectory& tr, const Metrics& m) {
    std::string out = "kind,time_s,bus,old_level,new_level,clear_time_s,peak_fraction,energy_mwh\n";
    for (const auto& e : tr.relay_events) {
        out += fmt::format("relay,{},{},{},{},,,\n", e.time, e.bus, e.old_level, e.new_level);
    }
    for (const auto& e : m.events) {
        out += fmt::format("shed,{},,,,{},{},{}\n", e.trigger_time, e.clear_time, e.peak_fraction, e.energy_mwh);
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError(fmt::format("write failed for '{}'", path.string()));
    }
}

void export_results(const Trajectory& tr, const Metrics& m, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
    write_text_file(dir / "trajectory.csv", trajectory_csv(tr));
    write_text_file(dir / "metrics.json", metrics_to_json(m));
    write_text_file(dir / "events.csv", events_csv(tr, m));
}

}  // namespace gridfreq
