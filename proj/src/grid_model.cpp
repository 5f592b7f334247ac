#include "gridfreq/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <fmt/format.h>
#include "json.hpp"

#include "gridfreq/error.hpp"

namespace gridfreq {

using nlohmann::json;

std::size_t GridModel::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == bus_id) {
            return i;
        }
    }
    throw ConfigError(fmt::format("unknown bus {}", bus_id));
}

std::size_t GridModel::generator_count() const {
    return static_cast<std::size_t>(
        std::count_if(buses.begin(), buses.end(), [](const BusSpec& b) { return b.generator.has_value(); }));
}

double GridModel::wind_capacity_mw() const {
    double total = 0.0;
    for (const auto& b : buses) {
        total += b.wind_mw.value_or(0.0);
    }
    return total;
}

double GridModel::forecast_load_mw() const {
    double total = 0.0;
    for (const auto& b : buses) {
        total += b.load_mw.value_or(0.0);
    }
    return total;
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        out = it->get<T>();
    }
}

void read_steam(const json& j, SteamParams& p) {
    read_opt(j, "gain", p.gain);
    read_opt(j, "speed_reference", p.speed_reference);
    read_opt(j, "t_speed_relay", p.t_speed_relay);
    read_opt(j, "t_servo", p.t_servo);
    read_opt(j, "rate_open", p.rate_open);
    read_opt(j, "rate_close", p.rate_close);
    read_opt(j, "valve_max", p.valve_max);
    read_opt(j, "valve_min", p.valve_min);
    read_opt(j, "t_chest", p.t_chest);
    read_opt(j, "t_reheat", p.t_reheat);
    read_opt(j, "t_crossover", p.t_crossover);
    read_opt(j, "f_hp", p.f_hp);
    read_opt(j, "f_ip", p.f_ip);
    read_opt(j, "f_lpa", p.f_lpa);
    read_opt(j, "f_lpb", p.f_lpb);
    read_opt(j, "p_max", p.p_max);
}

void read_hydro(const json& j, HydroParams& p) {
    read_opt(j, "kp", p.kp);
    read_opt(j, "ki", p.ki);
    read_opt(j, "kd", p.kd);
    read_opt(j, "td", p.td);
    read_opt(j, "ka", p.ka);
    read_opt(j, "ta", p.ta);
    read_opt(j, "permanent_droop", p.permanent_droop);
    read_opt(j, "gate_min", p.gate_min);
    read_opt(j, "gate_max", p.gate_max);
    read_opt(j, "water_time", p.water_time);
    read_opt(j, "no_load_flow", p.no_load_flow);
    read_opt(j, "turbine_gain", p.turbine_gain);
    read_opt(j, "gate_floor", p.gate_floor);
    if (auto it = j.find("feedback"); it != j.end()) {
        const auto mode = it->get<std::string>();
        if (mode == "electrical_power") {
            p.feedback = HydroDroopFeedback::electrical_power;
        } else if (mode == "gate") {
            p.feedback = HydroDroopFeedback::gate;
        } else {
            throw ConfigError(fmt::format("hydro feedback must be 'electrical_power' or 'gate', got '{}'", mode));
        }
    }
}

void read_machine(const json& j, MachineParams& p) {
    read_opt(j, "H", p.inertia);
    read_opt(j, "D", p.damping);
    read_opt(j, "x_coupling", p.x_coupling);
    if (auto it = j.find("steam"); it != j.end()) {
        read_steam(*it, p.steam);
    }
    if (auto it = j.find("hydro"); it != j.end()) {
        read_hydro(*it, p.hydro);
    }
}

GenType parse_gen_type(const std::string& s, const std::string& where) {
    if (s == "thermal" || s == "steam") {
        return GenType::thermal;
    }
    if (s == "hydro") {
        return GenType::hydro;
    }
    throw ConfigError(fmt::format("{}: generator type must be 'thermal' or 'hydro', got '{}'", where, s));
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError(fmt::format("{}: missing '{}'", where, key));
    }
    return *it;
}

GridModel parse_grid(const json& doc) {
    GridModel model;
    read_opt(doc, "base_mva", model.base_mva);
    read_opt(doc, "f0", model.f0);
    read_opt(doc, "slack_bus", model.slack_bus);
    if (auto it = doc.find("wind_total_mw"); it != doc.end()) {
        model.wind_total_mw = it->get<double>();
    }

    MachineParams thermal_defaults = default_machine_params(GenType::thermal);
    MachineParams hydro_defaults = default_machine_params(GenType::hydro);
    if (auto it = doc.find("machine_defaults"); it != doc.end()) {
        if (auto t = it->find("thermal"); t != it->end()) {
            read_machine(*t, thermal_defaults);
        }
        if (auto h = it->find("hydro"); h != it->end()) {
            read_machine(*h, hydro_defaults);
        }
    }

    const json& buses = require(doc, "buses", "grid config");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const json& jb = buses[i];
        const std::string where = fmt::format("buses[{}]", i);
        BusSpec bus;
        bus.id = require(jb, "id", where).get<int>();
        if (auto it = jb.find("load_mw"); it != jb.end()) {
            bus.load_mw = it->get<double>();
        }
        if (auto it = jb.find("wind_mw"); it != jb.end()) {
            bus.wind_mw = it->get<double>();
        }
        read_opt(jb, "dispatched", bus.dispatched);
        if (auto it = jb.find("generator"); it != jb.end()) {
            const std::string gwhere = fmt::format("bus {} generator", bus.id);
            GeneratorSpec gen;
            gen.id = require(*it, "id", gwhere).get<std::string>();
            gen.type = parse_gen_type(require(*it, "type", gwhere).get<std::string>(), gwhere);
            gen.rating_mva = require(*it, "mva", gwhere).get<double>();
            gen.params = gen.type == GenType::thermal ? thermal_defaults : hydro_defaults;
            gen.params.type = gen.type;
            read_machine(*it, gen.params);
            bus.generator = gen;
        }
        model.buses.push_back(std::move(bus));
    }

    const json& lines = require(doc, "lines", "grid config");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const json& jl = lines[i];
        const std::string where = fmt::format("lines[{}]", i);
        LineSpec line;
        line.from = require(jl, "from", where).get<int>();
        line.to = require(jl, "to", where).get<int>();
        if (auto b = jl.find("b"); b != jl.end()) {
            line.susceptance = b->get<double>();
        } else {
            const double x = require(jl, "x", where).get<double>();
            if (x <= 0.0) {
                throw ConfigError(fmt::format("{} ({}-{}): reactance must be positive", where, line.from, line.to));
            }
            line.susceptance = 1.0 / x;
        }
        model.lines.push_back(line);
    }
    return model;
}

}  // namespace

void validate_grid(const GridModel& model) {
    if (model.base_mva <= 0.0 || model.f0 <= 0.0) {
        throw ConfigError("base_mva and f0 must be positive");
    }
    if (model.buses.empty()) {
        throw ConfigError("grid has no buses");
    }
    std::set<int> ids;
    std::set<std::string> gen_ids;
    for (const auto& b : model.buses) {
        if (!ids.insert(b.id).second) {
            throw ConfigError(fmt::format("duplicate bus id {}", b.id));
        }
        if (b.load_mw && *b.load_mw <= 0.0) {
            throw ConfigError(fmt::format("bus {}: load_mw must be positive", b.id));
        }
        if (b.wind_mw && *b.wind_mw <= 0.0) {
            throw ConfigError(fmt::format("bus {}: wind_mw must be positive", b.id));
        }
        if (b.dispatched && !b.load_mw && !b.wind_mw) {
            throw ConfigError(fmt::format("bus {}: dispatched bus needs a load or wind farm", b.id));
        }
        if (b.generator) {
            const auto& g = *b.generator;
            if (!gen_ids.insert(g.id).second) {
                throw ConfigError(fmt::format("duplicate generator id {}", g.id));
            }
            if (g.rating_mva <= 0.0) {
                throw ConfigError(fmt::format("generator {}: rating must be positive", g.id));
            }
            if (g.params.inertia <= 0.0 || g.params.x_coupling <= 0.0) {
                throw ConfigError(fmt::format("generator {}: H and x_coupling must be positive", g.id));
            }
        }
    }
    if (gen_ids.empty()) {
        throw ConfigError("grid has no generators");
    }
    if (!ids.count(model.slack_bus)) {
        throw ConfigError(fmt::format("slack bus {} does not exist", model.slack_bus));
    }
    for (std::size_t i = 0; i < model.lines.size(); ++i) {
        const auto& l = model.lines[i];
        for (int end : {l.from, l.to}) {
            if (!ids.count(end)) {
                throw ConfigError(fmt::format("line {} ({}-{}): dangling endpoint {}", i, l.from, l.to, end));
            }
        }
        if (l.from == l.to) {
            throw ConfigError(fmt::format("line {} connects bus {} to itself", i, l.from));
        }
        if (!(l.susceptance > 0.0)) {
            throw ConfigError(fmt::format("line {} ({}-{}): susceptance must be positive", i, l.from, l.to));
        }
    }

    // Connectivity by BFS from the first bus.
    const std::size_t n = model.buses.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& l : model.lines) {
        const auto a = model.bus_index(l.from);
        const auto b = model.bus_index(l.to);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
        const auto k = q.front();
        q.pop();
        for (auto m : adj[k]) {
            if (!seen[m]) {
                seen[m] = true;
                q.push(m);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
            throw ConfigError(fmt::format("disconnected network: bus {} unreachable from bus {}", model.buses[i].id,
                                          model.buses[0].id));
        }
    }

    if (model.wind_total_mw) {
        const double total = model.wind_capacity_mw();
        if (std::abs(total - *model.wind_total_mw) > 1e-6) {
            throw ConfigError(fmt::format("wind farm ratings sum to {} MW, expected {} MW", total,
                                          *model.wind_total_mw));
        }
    }
}

GridModel load_grid_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("grid config parse failure: {}", e.what()));
    }
    GridModel model;
    try {
        model = parse_grid(doc);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("grid config: {}", e.what()));
    }
    validate_grid(model);
    return model;
}

GridModel load_grid_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open grid config '{}'", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return load_grid_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

SusceptanceMatrix build_susceptance_matrix(const GridModel& model) {
    const auto n = static_cast<Eigen::Index>(model.buses.size());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(4 * model.lines.size());
    for (const auto& l : model.lines) {
        const auto i = static_cast<Eigen::Index>(model.bus_index(l.from));
        const auto j = static_cast<Eigen::Index>(model.bus_index(l.to));
        trips.emplace_back(i, i, l.susceptance);
        trips.emplace_back(j, j, l.susceptance);
        trips.emplace_back(i, j, -l.susceptance);
        trips.emplace_back(j, i, -l.susceptance);
    }
    SusceptanceMatrix out;
    out.full.resize(n, n);
    out.full.setFromTriplets(trips.begin(), trips.end());
    out.slack_index = model.bus_index(model.slack_bus);

    const auto s = static_cast<Eigen::Index>(out.slack_index);
    auto reduce = [s](Eigen::Index k) { return k < s ? k : k - 1; };
    std::vector<Eigen::Triplet<double>> red;
    red.reserve(trips.size());
    for (Eigen::Index k = 0; k < out.full.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(out.full, k); it; ++it) {
            if (it.row() != s && it.col() != s) {
                red.emplace_back(reduce(it.row()), reduce(it.col()), it.value());
            }
        }
    }
    out.reduced.resize(n - 1, n - 1);
    out.reduced.setFromTriplets(red.begin(), red.end());
    return out;
}

DcFlowResult solve_dc_flow(const SusceptanceMatrix& b, const std::vector<double>& injections_pu) {
    const auto n = b.full.rows();
    if (static_cast<Eigen::Index>(injections_pu.size()) != n) {
        throw Error("injection vector size does not match bus count");
    }
    const auto s = static_cast<Eigen::Index>(b.slack_index);
    DcFlowResult out;
    out.angles.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 1) {
        out.slack_injection_pu = -injections_pu[0];
        return out;
    }
    Eigen::VectorXd rhs(n - 1);
    for (Eigen::Index k = 0, r = 0; k < n; ++k) {
        if (k != s) {
            rhs(r++) = injections_pu[static_cast<std::size_t>(k)];
        }
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(b.reduced);
    if (ldlt.info() != Eigen::Success) {
        throw IslandingError("susceptance matrix is singular: network is islanded");
    }
    const Eigen::VectorXd d = ldlt.vectorD();
    if (d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff())) {
        throw IslandingError("susceptance matrix is singular: network is islanded");
    }
    const Eigen::VectorXd theta = ldlt.solve(rhs);
    for (Eigen::Index k = 0, r = 0; k < n; ++k) {
        if (k != s) {
            out.angles[static_cast<std::size_t>(k)] = theta(r++);
        }
    }
    // Slack absorbs whatever the other buses do not balance.
    double total = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (k != s) {
            total += injections_pu[static_cast<std::size_t>(k)];
        }
    }
    out.slack_injection_pu = -total;
    return out;
}

double line_flow(const GridModel& model, const LineSpec& line, const std::vector<double>& angles) {
    return line.susceptance * (angles[model.bus_index(line.from)] - angles[model.bus_index(line.to)]);
}

void write_matrix_csv(const Eigen::SparseMatrix<double>& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    const Eigen::MatrixXd dense(m);
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        for (Eigen::Index j = 0; j < dense.cols(); ++j) {
            out << (j ? "," : "") << fmt::format("{}", dense(i, j));
        }
        out << '\n';
    }
}

}  // namespace gridfreq
