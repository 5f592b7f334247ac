#include "gridfreq/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include <fmt/format.h>

#include "gridfreq/error.hpp"
#include "gridfreq/rng.hpp"

namespace gridfreq {

// --- Trajectory ----------------------------------------------------------

Trajectory::Trajectory(std::vector<std::string> columns) : columns_(std::move(columns)) {}

std::optional<std::size_t> Trajectory::find(const std::string& column) const {
    const auto it = std::find(columns_.begin(), columns_.end(), column);
    if (it == columns_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - columns_.begin());
}

std::size_t Trajectory::index(const std::string& column) const {
    if (auto k = find(column)) {
        return *k;
    }
    throw SchemaError(fmt::format("trajectory has no channel '{}'", column));
}

std::vector<double> Trajectory::column(const std::string& name) const {
    const auto k = index(name);
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = at(r, k);
    }
    return out;
}

void Trajectory::add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size()) {
        throw Error("trajectory row width mismatch");
    }
    data_.insert(data_.end(), row.begin(), row.end());
}

Trajectory Trajectory::slice(std::size_t first, std::size_t last) const {
    Trajectory out(columns_);
    out.scenario = scenario;
    out.mode = mode;
    out.f0 = f0;
    const auto w = columns_.size();
    out.data_.assign(data_.begin() + static_cast<std::ptrdiff_t>(first * w),
                     data_.begin() + static_cast<std::ptrdiff_t>(last * w));
    return out;
}

// --- profiles ------------------------------------------------------------

namespace {

SecondSeries per_unit_series(ProfileSource source, double constant, const WalkParams& walk, double sigma,
                             const std::map<int, std::filesystem::path>& csv, int bus, std::uint64_t seed,
                             Stream minute_stream, Stream second_stream, std::size_t seconds, bool wind) {
    SecondSeries s;
    if (source == ProfileSource::constant) {
        s.values.assign(seconds, constant);
        s.kind = wind ? SeriesKind::wind : SeriesKind::load;
        return s;
    }
    MinuteSeries minutes;
    if (source == ProfileSource::csv) {
        const auto& path = csv.at(bus);
        minutes = wind ? read_minute_csv(path, 0.0, 1.0) : read_minute_csv(path);
    } else {
        minutes = synthetic_minutes(minutes_for_horizon(static_cast<double>(seconds - 1)), walk,
                                    derive_seed(seed, static_cast<std::uint64_t>(bus), minute_stream));
    }
    const NoiseParams noise{sigma, derive_seed(seed, static_cast<std::uint64_t>(bus), second_stream)};
    s = wind ? resample_wind(minutes, noise) : resample_load(minutes, noise);
    if (s.values.size() < seconds) {
        throw ConfigError(fmt::format("bus {}: {} profile covers {} s, scenario needs {} s", bus,
                                      wind ? "wind" : "load", s.values.size() - 1, seconds - 1));
    }
    s.values.resize(seconds);
    return s;
}

ErrorCdf scenario_cdf(const DispatchSettings& d) {
    switch (d.mode) {
    case DispatchErrorMode::ideal:
        return ideal_error_cdf();
    case DispatchErrorMode::placeholder:
        return placeholder_error_cdf();
    case DispatchErrorMode::csv:
        return read_error_cdf_csv(d.cdf_path);
    }
    return ideal_error_cdf();
}

}  // namespace

ProfileSet build_profiles(const GridModel& model, const Scenario& sc) {
    ProfileSet out;
    out.seconds = static_cast<std::size_t>(std::floor(sc.duration + 1e-9)) + 1;
    const auto& p = sc.profiles;
    for (const auto& b : model.buses) {
        if (b.wind_mw) {
            auto pu = per_unit_series(p.wind_source, p.wind_constant, p.wind_walk, p.wind_sigma, p.wind_csv, b.id,
                                      sc.seed, Stream::wind_minutes, Stream::wind_seconds, out.seconds, true);
            auto mw = scale_wind(pu, *b.wind_mw);
            mw.bus = b.id;
            out.wind.emplace(b.id, std::move(mw));
        }
        if (b.load_mw) {
            auto pu = per_unit_series(p.load_source, p.load_constant, p.load_walk, p.load_sigma, p.load_csv, b.id,
                                      sc.seed, Stream::load_minutes, Stream::load_seconds, out.seconds, false);
            auto mw = make_load_profile(pu, *b.load_mw);
            mw.bus = b.id;
            out.load.emplace(b.id, std::move(mw));
        }
    }
    if (sc.mode == CaseMode::B) {
        const ErrorCdf cdf = scenario_cdf(sc.dispatch);
        for (const auto& b : model.buses) {
            if (!b.dispatched) {
                continue;
            }
            const SecondSeries* w = b.wind_mw ? &out.wind.at(b.id) : nullptr;
            const SecondSeries* l = b.load_mw ? &out.load.at(b.id) : nullptr;
            out.battery.emplace(
                b.id, make_battery_series(b.id, b.wind_mw.value_or(0.0), b.load_mw.value_or(0.0), w, l, out.seconds,
                                          cdf,
                                          derive_seed(sc.seed, static_cast<std::uint64_t>(b.id), Stream::dispatch_error),
                                          sc.dispatch.battery));
        }
    }
    return out;
}

std::uint64_t profile_hash(const ProfileSet& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto* m : {&p.wind, &p.load}) {
        for (const auto& [bus, s] : *m) {
            feed(&bus, sizeof bus);
            feed(s.values.data(), s.values.size() * sizeof(double));
        }
    }
    return h;
}

// --- Simulation ----------------------------------------------------------

Simulation::Simulation(const GridModel& model, const Scenario& scenario)
    : Simulation(model, scenario, build_profiles(model, scenario)) {}

Simulation::Simulation(const GridModel& model, const Scenario& scenario, ProfileSet profiles)
    : model_(model), scenario_(scenario), profiles_(std::move(profiles)) {
    validate_scenario(model_, scenario_);
    initialize();
}

void Simulation::initialize() {
    omega_s_ = 2.0 * std::numbers::pi * model_.f0;
    const std::size_t nbus = model_.buses.size();

    double total_rating = 0.0;
    for (std::size_t k = 0; k < nbus; ++k) {
        const auto& b = model_.buses[k];
        if (b.generator) {
            gens_.push_back(&*b.generator);
            gen_bus_.push_back(k);
            gen_ids_.push_back(b.generator->id);
            total_rating += b.generator->rating_mva;
        }
        if (b.load_mw) {
            load_buses_.push_back(k);
        }
    }

    // Set-points balance forecast load minus forecast wind, shared by rating.
    const double net_mw = model_.forecast_load_mw() - model_.wind_capacity_mw();
    if (net_mw < 0.0) {
        throw ConfigError("forecast wind exceeds forecast load; no generator set-point is feasible");
    }
    std::vector<double> inj0(nbus, 0.0);
    for (std::size_t k = 0; k < nbus; ++k) {
        inj0[k] = model_.buses[k].wind_mw.value_or(0.0) - model_.buses[k].load_mw.value_or(0.0);
    }
    std::vector<MachineCoupling> couplings;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        const auto* g = gens_[i];
        const double p = net_mw * g->rating_mva / total_rating;
        setpoint_mw_.push_back(p);
        inj0[gen_bus_[i]] += p;
        couplings.push_back({gen_bus_[i], g->rating_mva / (g->params.x_coupling * model_.base_mva)});
    }
    for (double& v : inj0) {
        v /= model_.base_mva;
    }
    const auto flow = solve_dc_flow(build_susceptance_matrix(model_), inj0);

    for (std::size_t i = 0; i < gens_.size(); ++i) {
        const auto* g = gens_[i];
        const double p_mb = setpoint_mw_[i] / g->rating_mva;
        MachineState m;
        m.delta = flow.angles[gen_bus_[i]] + setpoint_mw_[i] / model_.base_mva / couplings[i].admittance;
        m.pm = p_mb;
        m.pe = p_mb;
        if (g->type == GenType::thermal) {
            m.governor = steam_equilibrium(g->params.steam, p_mb);
            steam_steps_.emplace_back(SteamTurbineStep(g->params.steam, scenario_.dt));
            hydro_servo_.emplace_back(std::nullopt);
        } else {
            m.governor = hydro_equilibrium(g->params.hydro, p_mb);
            steam_steps_.emplace_back(std::nullopt);
            hydro_servo_.emplace_back(HydroServoStep(g->params.hydro, scenario_.dt));
        }
        state_.machines.push_back(m);
    }
    network_.emplace(model_, std::move(couplings));

    for (const auto k : load_buses_) {
        UflsRelayState r;
        r.bus = model_.buses[k].id;
        r.f0 = model_.f0;
        state_.relays.push_back(r);
    }
    state_.estimators.assign(nbus, FrequencyEstimator{model_.f0, scenario_.estimator_time_constant, {}, 0.0});
    state_.bus_frequency.assign(nbus, model_.f0);
    state_.load_offset_mw.assign(nbus, 0.0);
    inj_.assign(nbus, BusInjection{});
    inj_pu_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nbus));

    refresh_injections();
    Eigen::VectorXd delta(static_cast<Eigen::Index>(gens_.size()));
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        delta(static_cast<Eigen::Index>(i)) = state_.machines[i].delta;
    }
    state_.bus_angles = network_->bus_angles(delta);
    for (std::size_t k = 0; k < nbus; ++k) {
        state_.estimators[k].last_angle = state_.bus_angles(static_cast<Eigen::Index>(k));
    }

    log_.push_back(fmt::format("scenario {} case {} seed {} dt {} duration {}", scenario_.name,
                               to_string(scenario_.mode), scenario_.seed, scenario_.dt, scenario_.duration));
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        log_.push_back(fmt::format("set-point {} {:.3f} MW ({} MVA {})", gen_ids_[i], setpoint_mw_[i],
                                   gens_[i]->rating_mva, to_string(gens_[i]->type)));
    }
}

void Simulation::refresh_injections() {
    const double t = state_.time;
    std::vector<double> level(model_.buses.size(), 0.0);
    for (std::size_t r = 0; r < load_buses_.size(); ++r) {
        level[load_buses_[r]] = state_.relays[r].level;
    }
    Eigen::VectorXd pu(static_cast<Eigen::Index>(model_.buses.size()));
    for (std::size_t k = 0; k < model_.buses.size(); ++k) {
        const auto& b = model_.buses[k];
        BusInjection& x = inj_[k];
        x.wind = b.wind_mw ? profiles_.wind.at(b.id).at(t) : 0.0;
        x.load = b.load_mw ? profiles_.load.at(b.id).at(t) + state_.load_offset_mw[k] : state_.load_offset_mw[k];
        x.served = (1.0 - level[k]) * x.load;
        x.battery = x.battery_ideal = x.eps = 0.0;
        if (auto it = profiles_.battery.find(b.id); it != profiles_.battery.end()) {
            const auto sec = std::min(static_cast<std::size_t>(std::floor(t + 1e-9)), it->second.injection.size() - 1);
            x.battery = it->second.injection[sec];
            x.battery_ideal = it->second.ideal[sec];
            x.eps = it->second.eps[sec];
        }
        pu(static_cast<Eigen::Index>(k)) = (x.wind - x.served + x.battery) / model_.base_mva;
    }
    if (pu != network_->injections()) {
        network_->set_injections(pu);
    }
    inj_pu_ = pu;
}

Eigen::VectorXd Simulation::machine_power_pu(const Eigen::VectorXd& delta) const {
    Eigen::VectorXd pe = network_->electrical_power(delta);
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        pe(static_cast<Eigen::Index>(i)) *= model_.base_mva / gens_[i]->rating_mva;
    }
    return pe;
}

void Simulation::step() {
    const double dt = scenario_.dt;
    const auto m = static_cast<Eigen::Index>(gens_.size());

    refresh_injections();
    Eigen::VectorXd delta(m);
    Eigen::VectorXd dw(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        delta(i) = state_.machines[static_cast<std::size_t>(i)].delta;
        dw(i) = state_.machines[static_cast<std::size_t>(i)].dw;
    }
    const Eigen::VectorXd pe0 = machine_power_pu(delta);

    // Network bookkeeping at the start of the step.
    const Eigen::VectorXd theta0 = network_->bus_angles(delta);
    stats_.max_solve_residual_pu = std::max(stats_.max_solve_residual_pu, network_->solve_residual(theta0, delta));
    double balance = inj_pu_.sum();
    for (Eigen::Index i = 0; i < m; ++i) {
        balance += pe0(i) * gens_[static_cast<std::size_t>(i)]->rating_mva / model_.base_mva;
    }
    stats_.max_balance_residual_pu = std::max(stats_.max_balance_residual_pu, std::abs(balance));

    // Governors and turbines see inputs held over the step. A predictor pass
    // with the inputs at t estimates the end state; the corrector reruns the
    // step from the same start with inputs averaged over both ends.
    const std::vector<MachineState> start = state_.machines;
    Eigen::VectorXd pm0(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        pm0(i) = start[static_cast<std::size_t>(i)].pm;
    }
    auto advance_prime_movers = [&](const Eigen::VectorXd& w_in, const Eigen::VectorXd& pe_in, bool count) {
        Eigen::VectorXd pm1(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            auto& ms = state_.machines[static_cast<std::size_t>(i)];
            const auto* g = gens_[static_cast<std::size_t>(i)];
            ms.governor = start[static_cast<std::size_t>(i)].governor;
            if (!ms.online) {
                pm1(i) = 0.0;
                continue;
            }
            if (auto* s = std::get_if<SteamGovState>(&ms.governor)) {
                const double v0 = s->valve;
                *s = steam_governor_step(g->params.steam, *s, w_in(i), dt);
                *s = (*steam_steps_[static_cast<std::size_t>(i)])(*s, v0, s->valve);
                pm1(i) = steam_power(g->params.steam, *s);
            } else {
                auto& h = std::get<HydroGovState>(ms.governor);
                const double g0 = h.gate;
                const auto hits = h.gate_floor_hits;
                h = hydro_governor_step(g->params.hydro, *hydro_servo_[static_cast<std::size_t>(i)], h, w_in(i),
                                        pe_in(i) - h.p_ref);
                h = hydro_turbine_step(g->params.hydro, h, g0, dt);
                if (count) {
                    stats_.gate_floor_hits += h.gate_floor_hits - hits;
                }
                pm1(i) = hydro_power(g->params.hydro, h);
            }
        }
        return pm1;
    };

    // Rotors: RK4 with mechanical power ramped across the step.
    auto integrate_rotors = [&](const Eigen::VectorXd& pm1, Eigen::VectorXd& delta1, Eigen::VectorXd& dw1) {
        auto deriv = [&](double tau, const Eigen::VectorXd& d, const Eigen::VectorXd& w, Eigen::VectorXd& dd,
                         Eigen::VectorXd& dwd) {
            const Eigen::VectorXd pe = machine_power_pu(d);
            dd.resize(m);
            dwd.resize(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                const auto& ms = state_.machines[static_cast<std::size_t>(i)];
                if (!ms.online) {
                    dd(i) = 0.0;
                    dwd(i) = 0.0;
                    continue;
                }
                const auto& p = gens_[static_cast<std::size_t>(i)]->params;
                const double pm = pm0(i) + (pm1(i) - pm0(i)) * tau / dt;
                dwd(i) = swing_acceleration(pm, pe(i), w(i), p.inertia, p.damping);
                dd(i) = omega_s_ * w(i);
            }
        };
        Eigen::VectorXd k1d, k1w, k2d, k2w, k3d, k3w, k4d, k4w;
        deriv(0.0, delta, dw, k1d, k1w);
        deriv(0.5 * dt, delta + 0.5 * dt * k1d, dw + 0.5 * dt * k1w, k2d, k2w);
        deriv(0.5 * dt, delta + 0.5 * dt * k2d, dw + 0.5 * dt * k2w, k3d, k3w);
        deriv(dt, delta + dt * k3d, dw + dt * k3w, k4d, k4w);
        delta1 = delta + dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        dw1 = dw + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    };

    Eigen::VectorXd delta1, dw1;
    integrate_rotors(advance_prime_movers(dw, pe0, false), delta1, dw1);
    const Eigen::VectorXd pe1 = machine_power_pu(delta1);
    const Eigen::VectorXd pm1 = advance_prime_movers(0.5 * (dw + dw1), 0.5 * (pe0 + pe1), true);
    integrate_rotors(pm1, delta1, dw1);

    for (Eigen::Index i = 0; i < m; ++i) {
        auto& ms = state_.machines[static_cast<std::size_t>(i)];
        ms.pe = ms.online ? pe0(i) : 0.0;
        if (ms.online) {
            ms.delta = delta1(i);
            ms.dw = dw1(i);
            ms.pm = pm1(i);
        }
    }

    ++state_.step;
    ++stats_.steps;
    state_.time = static_cast<double>(state_.step) * dt;

    // Measurements and relays at t + dt.
    state_.bus_angles = network_->bus_angles(delta1);
    for (std::size_t k = 0; k < model_.buses.size(); ++k) {
        state_.bus_frequency[k] =
            estimate_bus_frequency(state_.estimators[k], state_.bus_angles(static_cast<Eigen::Index>(k)), dt);
    }
    if (scenario_.ufls_enabled) {
        for (std::size_t r = 0; r < load_buses_.size(); ++r) {
            const double before = state_.relays[r].level;
            state_.relays[r] = ufls_step(state_.relays[r], state_.bus_frequency[load_buses_[r]], dt, scenario_.ufls);
            if (state_.relays[r].level != before) {
                relay_events_.push_back({state_.relays[r].bus, state_.time, before, state_.relays[r].level});
                log_.push_back(fmt::format("{:.3f}s ufls bus {} {:.2f} -> {:.2f}", state_.time, state_.relays[r].bus,
                                           before, state_.relays[r].level));
            }
        }
    }
}

void Simulation::apply_contingency(const ContingencyEvent& event) {
    if (event.kind == ContingencyEvent::Kind::load_step) {
        state_.load_offset_mw[model_.bus_index(event.bus)] += event.delta_mw;
        log_.push_back(fmt::format("{:.3f}s load step bus {} {:+.3f} MW", state_.time, event.bus, event.delta_mw));
        return;
    }
    const auto it = std::find(gen_ids_.begin(), gen_ids_.end(), event.generator);
    if (it == gen_ids_.end()) {
        throw ConfigError(fmt::format("unknown generator '{}'", event.generator));
    }
    const auto i = static_cast<std::size_t>(it - gen_ids_.begin());
    auto& ms = state_.machines[i];
    if (!ms.online) {
        log_.push_back(fmt::format("{:.3f}s warning: {} already offline, trip ignored", state_.time, event.generator));
        return;
    }
    ms.online = false;
    ms.pm = 0.0;
    ms.pe = 0.0;
    std::vector<bool> online;
    for (const auto& x : state_.machines) {
        online.push_back(x.online);
    }
    try {
        network_->set_online(online);
    } catch (const IslandingError& e) {
        throw IslandingError(fmt::format("t={:.3f}s after trip of {}: {}", state_.time, event.generator, e.what()));
    }
    log_.push_back(fmt::format("{:.3f}s trip {} ({} MVA); online rating {} MVA", state_.time, event.generator,
                               gens_[i]->rating_mva, online_rating_mva()));
}

double Simulation::coi_frequency() const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (!state_.machines[i].online) {
            continue;
        }
        const double w = gens_[i]->params.inertia * gens_[i]->rating_mva;
        num += w * state_.machines[i].dw;
        den += w;
    }
    return model_.f0 * (1.0 + (den > 0.0 ? num / den : 0.0));
}

double Simulation::online_rating_mva() const {
    double total = 0.0;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (state_.machines[i].online) {
            total += gens_[i]->rating_mva;
        }
    }
    return total;
}

std::vector<std::string> Simulation::make_columns() const {
    std::vector<std::string> c{"t", "f_coi_hz"};
    for (const auto& b : model_.buses) {
        c.push_back(fmt::format("f_bus{}_hz", b.id));
    }
    for (const auto& id : gen_ids_) {
        c.push_back(fmt::format("gen{}_delta_rad", id));
        c.push_back(fmt::format("gen{}_dw_pu", id));
        c.push_back(fmt::format("gen{}_pm_mw", id));
        c.push_back(fmt::format("gen{}_pe_mw", id));
    }
    for (const auto k : load_buses_) {
        const int id = model_.buses[k].id;
        c.push_back(fmt::format("load{}_expected_mw", id));
        c.push_back(fmt::format("load{}_served_mw", id));
        c.push_back(fmt::format("load{}_shed", id));
    }
    for (const auto& [bus, s] : profiles_.wind) {
        c.push_back(fmt::format("wind{}_mw", bus));
    }
    for (const auto& [bus, s] : profiles_.battery) {
        c.push_back(fmt::format("batt{}_mw", bus));
        c.push_back(fmt::format("batt{}_ideal_mw", bus));
        c.push_back(fmt::format("batt{}_eps", bus));
        c.push_back(fmt::format("net{}_mw", bus));
    }
    return c;
}

std::vector<double> Simulation::make_row(const Eigen::VectorXd& pe_mb) const {
    std::vector<double> row{state_.time, coi_frequency()};
    row.insert(row.end(), state_.bus_frequency.begin(), state_.bus_frequency.end());
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        const auto& ms = state_.machines[i];
        const double s = gens_[i]->rating_mva;
        row.push_back(ms.delta);
        row.push_back(ms.dw);
        row.push_back(ms.online ? ms.pm * s : 0.0);
        row.push_back(ms.online ? pe_mb(static_cast<Eigen::Index>(i)) * s : 0.0);
    }
    for (std::size_t r = 0; r < load_buses_.size(); ++r) {
        const auto& x = inj_[load_buses_[r]];
        row.push_back(x.load);
        row.push_back(x.served);
        row.push_back(state_.relays[r].level);
    }
    for (const auto& [bus, s] : profiles_.wind) {
        row.push_back(inj_[model_.bus_index(bus)].wind);
    }
    for (const auto& [bus, s] : profiles_.battery) {
        const auto& x = inj_[model_.bus_index(bus)];
        row.push_back(x.battery);
        row.push_back(x.battery_ideal);
        row.push_back(x.eps);
        row.push_back(x.wind - x.load + x.battery);
    }
    return row;
}

Trajectory Simulation::run() {
    const auto n_steps = static_cast<std::uint64_t>(std::llround(scenario_.duration / scenario_.dt));
    const auto every = static_cast<std::uint64_t>(std::llround(scenario_.output_interval / scenario_.dt));
    auto events = scenario_.events;
    std::stable_sort(events.begin(), events.end(),
                     [](const ContingencyEvent& a, const ContingencyEvent& b) { return a.time < b.time; });

    Trajectory tr(make_columns());
    tr.scenario = scenario_.name;
    tr.mode = scenario_.mode;
    tr.f0 = model_.f0;

    std::size_t next_event = 0;
    const auto m = static_cast<Eigen::Index>(gens_.size());
    for (std::uint64_t n = 0; n <= n_steps; ++n) {
        while (next_event < events.size() && events[next_event].time <= state_.time + 1e-6) {
            apply_contingency(events[next_event++]);
        }
        if (n % every == 0) {
            refresh_injections();
            Eigen::VectorXd delta(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                delta(i) = state_.machines[static_cast<std::size_t>(i)].delta;
            }
            tr.add_row(make_row(machine_power_pu(delta)));
        }
        if (n < n_steps) {
            step();
        }
    }
    tr.relay_events = relay_events_;
    tr.log = log_;
    tr.stats = stats_;
    return tr;
}

Trajectory run_scenario(const GridModel& model, const Scenario& sc) {
    Simulation sim(model, sc);
    return sim.run();
}

}  // namespace gridfreq
