#include "gridfreq/machine.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "gridfreq/error.hpp"

namespace gridfreq {

LinearStep discretize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double dt) {
    const Eigen::Index n = a.rows();
    // Augmented state [x; u; du/dt] with du/dt constant over the step.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 2, n + 2);
    m.topLeftCorner(n, n) = a;
    m.block(0, n, n, 1) = b;
    m(n, n + 1) = 1.0;
    const Eigen::MatrixXd e = (m * dt).exp();

    LinearStep out;
    out.phi = e.topLeftCorner(n, n);
    const Eigen::VectorXd ga = e.block(0, n, n, 1);
    const Eigen::VectorXd gb = e.block(0, n + 1, n, 1);
    out.gamma0 = ga - gb / dt;
    out.gamma1 = gb / dt;
    return out;
}

std::string to_string(GenType type) {
    return type == GenType::thermal ? "thermal" : "hydro";
}

MachineParams default_machine_params(GenType type) {
    MachineParams p;
    p.type = type;
    p.inertia = type == GenType::thermal ? 5.0 : 3.5;
    return p;
}

// --- steam ---------------------------------------------------------------

double steam_governor_demand(const SteamParams& p, double dw) {
    return p.gain * (p.speed_reference - dw);
}

namespace {

// Servomotor: dC/dt = clamp((y - C) / T_SM, rate_close, rate_open), y held.
double servo_advance(const SteamParams& p, double valve, double target, double dt) {
    const double err = target - valve;
    if (p.t_servo <= 0.0) {
        return valve + std::clamp(err, p.rate_close * dt, p.rate_open * dt);
    }
    const double unsat_rate = err / p.t_servo;
    double limit = 0.0;
    if (unsat_rate > p.rate_open) {
        limit = p.rate_open;
    } else if (unsat_rate < p.rate_close) {
        limit = p.rate_close;
    } else {
        return target - err * std::exp(-dt / p.t_servo);
    }
    // Rate-saturated until the error shrinks to |limit| * T_SM, exponential after.
    const double edge = limit * p.t_servo;
    const double t_sat = (err - edge) / limit;
    if (t_sat >= dt) {
        return valve + limit * dt;
    }
    return target - edge * std::exp(-(dt - t_sat) / p.t_servo);
}

double admitted_flow(const SteamParams& p, double valve) {
    return std::clamp(valve, 0.0, p.p_max);
}

}  // namespace

SteamGovState steam_governor_step(const SteamParams& p, SteamGovState s, double dw, double dt) {
    const double command = s.p_ref + steam_governor_demand(p, dw);
    s.relay = lag_step(s.relay, command, p.t_speed_relay, dt);
    s.valve = std::clamp(servo_advance(p, s.valve, s.relay, dt), p.valve_min, p.valve_max);
    return s;
}

SteamTurbineStep::SteamTurbineStep(const SteamParams& p, double dt) : params_(p), dt_(dt) {
    if (p.t_chest <= 0.0 || p.t_reheat <= 0.0 || p.t_crossover <= 0.0) {
        throw ConfigError("steam turbine time constants must be positive");
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 0) = -1.0 / p.t_chest;
    a(1, 0) = 1.0 / p.t_reheat;
    a(1, 1) = -1.0 / p.t_reheat;
    a(2, 1) = 1.0 / p.t_crossover;
    a(2, 2) = -1.0 / p.t_crossover;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
    b(0) = 1.0 / p.t_chest;
    step_ = discretize(a, b, dt);
}

SteamGovState SteamTurbineStep::operator()(SteamGovState s, double valve_start, double valve_end) const {
    Eigen::VectorXd x(3);
    x << s.chest, s.reheat, s.crossover;
    x = step_.advance(x, admitted_flow(params_, valve_start), admitted_flow(params_, valve_end));
    s.chest = x(0);
    s.reheat = x(1);
    s.crossover = x(2);
    return s;
}

SteamGovState steam_turbine_step(const SteamParams& p, SteamGovState s, double dt) {
    return SteamTurbineStep(p, dt)(s, s.valve, s.valve);
}

double steam_power(const SteamParams& p, const SteamGovState& s) {
    return p.f_hp * s.chest + p.f_ip * s.reheat + (p.f_lpa + p.f_lpb) * s.crossover;
}

SteamGovState steam_equilibrium(const SteamParams& p, double pm) {
    if (pm < 0.0 || pm > p.p_max) {
        throw ConfigError("steam unit set-point outside [0, p_max]");
    }
    SteamGovState s;
    s.p_ref = pm;
    s.relay = pm;
    s.valve = pm;
    s.chest = pm;
    s.reheat = pm;
    s.crossover = pm;
    return s;
}

// --- hydro ---------------------------------------------------------------

HydroServoStep::HydroServoStep(const HydroParams& p, double dt) : dt_(dt) {
    if (p.ta <= 0.0) {
        throw ConfigError("hydro servo time constant must be positive");
    }
    // State [v; G]: T_a dv/dt = K_a (u - G) - v, dG/dt = v.
    Eigen::MatrixXd a(2, 2);
    a << -1.0 / p.ta, -p.ka / p.ta, 1.0, 0.0;
    Eigen::VectorXd b(2);
    b << p.ka / p.ta, 0.0;
    step_ = discretize(a, b, dt);
}

HydroGovState hydro_governor_step(const HydroParams& p, const HydroServoStep& servo, HydroGovState s,
                                  double dw, double dpe) {
    const double dt = servo.dt();
    const double feedback = p.feedback == HydroDroopFeedback::electrical_power ? dpe : s.gate - s.gate_ref;
    const double err = -dw - p.permanent_droop * feedback;

    double deriv = 0.0;
    if (p.kd != 0.0) {
        if (p.td > 0.0) {
            deriv = p.kd * (err - s.deriv_filter) / p.td;
            s.deriv_filter = lag_step(s.deriv_filter, err, p.td, dt);
        } else {
            deriv = p.kd * (err - s.deriv_filter) / dt;
            s.deriv_filter = err;
        }
    }

    // Conditional integration: hold the integrator while the command is
    // pinned at a gate limit and the error pushes further into it.
    const double unclamped = p.kp * err + s.integrator + deriv;
    const bool pinned_high = unclamped >= p.gate_max && err > 0.0;
    const bool pinned_low = unclamped <= p.gate_min && err < 0.0;
    if (!pinned_high && !pinned_low) {
        s.integrator = std::clamp(s.integrator + p.ki * err * dt, p.gate_min, p.gate_max);
    }
    const double command = std::clamp(p.kp * err + s.integrator + deriv, p.gate_min, p.gate_max);
    s.command = command;

    Eigen::VectorXd x(2);
    x << s.servo_velocity, s.gate;
    x = servo.step().advance(x, command, command);
    s.servo_velocity = x(0);
    s.gate = x(1);
    if (s.gate > p.gate_max) {
        s.gate = p.gate_max;
        s.servo_velocity = std::min(s.servo_velocity, 0.0);
    } else if (s.gate < p.gate_min) {
        s.gate = p.gate_min;
        s.servo_velocity = std::max(s.servo_velocity, 0.0);
    }
    return s;
}

HydroGovState hydro_governor_step(const HydroParams& p, HydroGovState s, double dw, double dpe, double dt) {
    return hydro_governor_step(p, HydroServoStep(p, dt), s, dw, dpe);
}

double hydro_head(const HydroParams& p, double flow, double gate) {
    const double g = std::max(gate, p.gate_floor);
    const double ratio = flow / g;
    return ratio * ratio;
}

HydroGovState hydro_turbine_step(const HydroParams& p, HydroGovState s, double gate_start, double dt) {
    const double gate_end = s.gate;
    if (std::min(gate_start, gate_end) < p.gate_floor) {
        ++s.gate_floor_hits;
    }
    auto gate_at = [&](double tau) { return gate_start + (gate_end - gate_start) * tau / dt; };
    auto rate = [&](double q, double tau) { return (1.0 - hydro_head(p, q, gate_at(tau))) / p.water_time; };

    // Substep when the water column is stiff (small gate, large flow).
    const double g_lo = std::max(std::min(gate_start, gate_end), p.gate_floor);
    const double stiffness = 2.0 * std::max(s.flow, 1e-6) / (g_lo * g_lo * p.water_time);
    const int n = std::clamp(static_cast<int>(std::ceil(dt * stiffness / 0.5)), 1, 10000);
    const double h = dt / n;

    double q = s.flow;
    for (int i = 0; i < n; ++i) {
        const double t0 = i * h;
        const double k1 = rate(q, t0);
        const double k2 = rate(q + 0.5 * h * k1, t0 + 0.5 * h);
        const double k3 = rate(q + 0.5 * h * k2, t0 + 0.5 * h);
        const double k4 = rate(q + h * k3, t0 + h);
        q = std::max(0.0, q + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    s.flow = q;
    return s;
}

HydroGovState hydro_turbine_step(const HydroParams& p, HydroGovState s, double dt) {
    return hydro_turbine_step(p, s, s.gate, dt);
}

double hydro_power(const HydroParams& p, const HydroGovState& s) {
    return p.at() * hydro_head(p, s.flow, s.gate) * (s.flow - p.no_load_flow);
}

HydroGovState hydro_equilibrium(const HydroParams& p, double pm) {
    const double gate = pm / p.at() + p.no_load_flow;
    if (gate < p.gate_min || gate > p.gate_max) {
        throw ConfigError("hydro unit set-point outside gate range");
    }
    HydroGovState s;
    s.p_ref = pm;
    s.gate_ref = gate;
    s.integrator = gate;
    s.command = gate;
    s.gate = gate;
    s.flow = gate;
    return s;
}

// --- rotor ---------------------------------------------------------------

MachineState swing_step(MachineState m, double pm, double pe, double h, double d, double dt, double omega_s) {
    if (!m.online) {
        return m;
    }
    auto acc = [&](double dw) { return swing_acceleration(pm, pe, dw, h, d); };
    const double w0 = m.dw;
    const double a1 = acc(w0);
    const double w1 = w0 + 0.5 * dt * a1;
    const double a2 = acc(w1);
    const double w2 = w0 + 0.5 * dt * a2;
    const double a3 = acc(w2);
    const double w3 = w0 + dt * a3;
    const double a4 = acc(w3);
    m.dw = w0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    m.delta += omega_s * dt / 6.0 * (w0 + 2.0 * w1 + 2.0 * w2 + w3);
    m.pm = pm;
    m.pe = pe;
    return m;
}

}  // namespace gridfreq
