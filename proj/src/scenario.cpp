#include "gridfreq/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "gridfreq/error.hpp"

namespace gridfreq {

using nlohmann::json;

std::string to_string(CaseMode mode) {
    return mode == CaseMode::A ? "A" : "B";
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        out = it->get<T>();
    }
}

ProfileSource parse_source(const std::string& s) {
    if (s == "synthetic") {
        return ProfileSource::synthetic;
    }
    if (s == "constant") {
        return ProfileSource::constant;
    }
    if (s == "csv") {
        return ProfileSource::csv;
    }
    throw ConfigError(fmt::format("profile source must be synthetic, constant or csv, got '{}'", s));
}

void read_walk(const json& j, WalkParams& w) {
    read_opt(j, "start", w.start);
    read_opt(j, "lo", w.lo);
    read_opt(j, "hi", w.hi);
    read_opt(j, "step_sd", w.step_sd);
}

std::map<int, std::filesystem::path> read_csv_map(const json& j, const std::filesystem::path& base) {
    std::map<int, std::filesystem::path> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::filesystem::path p = it.value().get<std::string>();
        if (p.is_relative() && !base.empty()) {
            p = base / p;
        }
        out[std::stoi(it.key())] = p;
    }
    return out;
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base) {
    Scenario sc;
    read_opt(doc, "name", sc.name);
    read_opt(doc, "group", sc.group);
    if (auto it = doc.find("case"); it != doc.end()) {
        const auto c = it->get<std::string>();
        if (c == "A") {
            sc.mode = CaseMode::A;
        } else if (c == "B") {
            sc.mode = CaseMode::B;
        } else {
            throw ConfigError(fmt::format("scenario '{}': case must be 'A' or 'B', got '{}'", sc.name, c));
        }
    }
    read_opt(doc, "duration", sc.duration);
    read_opt(doc, "dt", sc.dt);
    read_opt(doc, "seed", sc.seed);
    read_opt(doc, "output_interval", sc.output_interval);
    read_opt(doc, "estimator_time_constant", sc.estimator_time_constant);

    if (auto it = doc.find("events"); it != doc.end()) {
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& je = (*it)[i];
            ContingencyEvent ev;
            const std::string kind = je.value("kind", std::string("trip"));
            if (!je.contains("time")) {
                throw ConfigError(fmt::format("scenario '{}': events[{}] missing 'time'", sc.name, i));
            }
            ev.time = je.at("time").get<double>();
            if (kind == "trip") {
                ev.kind = ContingencyEvent::Kind::trip;
                if (!je.contains("generator")) {
                    throw ConfigError(fmt::format("scenario '{}': events[{}] missing 'generator'", sc.name, i));
                }
                ev.generator = je.at("generator").get<std::string>();
            } else if (kind == "load_step") {
                ev.kind = ContingencyEvent::Kind::load_step;
                ev.bus = je.at("bus").get<int>();
                ev.delta_mw = je.at("delta_mw").get<double>();
            } else {
                throw ConfigError(fmt::format("scenario '{}': events[{}] unknown kind '{}'", sc.name, i, kind));
            }
            sc.events.push_back(ev);
        }
    }

    if (auto it = doc.find("ufls"); it != doc.end()) {
        read_opt(*it, "enabled", sc.ufls_enabled);
        read_opt(*it, "shed_drop_hz", sc.ufls.shed_drop);
        read_opt(*it, "shed_level", sc.ufls.shed_level);
        read_opt(*it, "restore_drop_hz", sc.ufls.restore_drop);
        read_opt(*it, "restore_level", sc.ufls.restore_level);
        read_opt(*it, "delay", sc.ufls.delay);
    }

    if (auto it = doc.find("profiles"); it != doc.end()) {
        auto& p = sc.profiles;
        if (auto w = it->find("wind"); w != it->end()) {
            if (w->contains("source")) {
                p.wind_source = parse_source(w->at("source").get<std::string>());
            }
            read_opt(*w, "sigma", p.wind_sigma);
            read_opt(*w, "constant", p.wind_constant);
            if (auto walk = w->find("walk"); walk != w->end()) {
                read_walk(*walk, p.wind_walk);
            }
            if (auto csv = w->find("csv"); csv != w->end()) {
                p.wind_csv = read_csv_map(*csv, base);
            }
        }
        if (auto l = it->find("load"); l != it->end()) {
            if (l->contains("source")) {
                p.load_source = parse_source(l->at("source").get<std::string>());
            }
            read_opt(*l, "sigma", p.load_sigma);
            read_opt(*l, "constant", p.load_constant);
            if (auto walk = l->find("walk"); walk != l->end()) {
                read_walk(*walk, p.load_walk);
            }
            if (auto csv = l->find("csv"); csv != l->end()) {
                p.load_csv = read_csv_map(*csv, base);
            }
        }
    }

    if (auto it = doc.find("dispatch_error"); it != doc.end()) {
        auto& d = sc.dispatch;
        const auto mode = it->value("mode", std::string("placeholder"));
        if (mode == "ideal") {
            d.mode = DispatchErrorMode::ideal;
        } else if (mode == "placeholder") {
            d.mode = DispatchErrorMode::placeholder;
        } else if (mode == "csv") {
            d.mode = DispatchErrorMode::csv;
            std::filesystem::path p = it->at("path").get<std::string>();
            d.cdf_path = p.is_relative() && !base.empty() ? base / p : p;
        } else {
            throw ConfigError(fmt::format("dispatch_error mode must be ideal, placeholder or csv, got '{}'", mode));
        }
        read_opt(*it, "hold_interval_s", d.battery.hold_interval_s);
        if (auto cap = it->find("power_cap_mw"); cap != it->end() && !cap->is_null()) {
            d.battery.power_cap_mw = cap->get<double>();
        }
    }
    return sc;
}

}  // namespace

Scenario load_scenario(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("scenario parse failure: {}", e.what()));
    }
    Scenario sc;
    try {
        sc = parse_scenario(doc, base_dir);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("scenario: {}", e.what()));
    }
    if (!(sc.dt > 0.0) || !(sc.duration > 0.0) || !(sc.output_interval > 0.0)) {
        throw ConfigError(fmt::format("scenario '{}': dt, duration and output_interval must be positive", sc.name));
    }
    for (const auto& ev : sc.events) {
        if (ev.time < 0.0 || ev.time > sc.duration) {
            throw ConfigError(fmt::format("scenario '{}': event at t={} outside [0, {}]", sc.name, ev.time,
                                          sc.duration));
        }
    }
    sc.ufls.validate();
    return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open scenario '{}'", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return load_scenario(ss.str(), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void validate_scenario(const GridModel& model, const Scenario& sc) {
    for (const auto& ev : sc.events) {
        if (ev.time < 0.0 || ev.time > sc.duration) {
            throw ConfigError(fmt::format("scenario '{}': event at t={} outside [0, {}]", sc.name, ev.time,
                                          sc.duration));
        }
        if (ev.kind == ContingencyEvent::Kind::trip) {
            bool found = false;
            for (const auto& b : model.buses) {
                found = found || (b.generator && b.generator->id == ev.generator);
            }
            if (!found) {
                throw ConfigError(fmt::format("scenario '{}': unknown generator '{}'", sc.name, ev.generator));
            }
        } else {
            model.bus_index(ev.bus);
        }
    }
    const double ratio = sc.output_interval / sc.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9) {
        throw ConfigError(fmt::format("scenario '{}': output_interval must be a multiple of dt", sc.name));
    }
    for (const auto& [bus, path] : sc.profiles.wind_csv) {
        const auto& b = model.buses[model.bus_index(bus)];
        if (!b.wind_mw) {
            throw ConfigError(fmt::format("scenario '{}': wind CSV given for bus {} without a wind farm", sc.name, bus));
        }
    }
    for (const auto& [bus, path] : sc.profiles.load_csv) {
        const auto& b = model.buses[model.bus_index(bus)];
        if (!b.load_mw) {
            throw ConfigError(fmt::format("scenario '{}': load CSV given for bus {} without a load", sc.name, bus));
        }
    }
    if (sc.profiles.wind_source == ProfileSource::csv || sc.profiles.load_source == ProfileSource::csv) {
        for (const auto& b : model.buses) {
            if (sc.profiles.wind_source == ProfileSource::csv && b.wind_mw && !sc.profiles.wind_csv.count(b.id)) {
                throw ConfigError(fmt::format("scenario '{}': no wind CSV for bus {}", sc.name, b.id));
            }
            if (sc.profiles.load_source == ProfileSource::csv && b.load_mw && !sc.profiles.load_csv.count(b.id)) {
                throw ConfigError(fmt::format("scenario '{}': no load CSV for bus {}", sc.name, b.id));
            }
        }
    }
}

}  // namespace gridfreq
