#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "gridfreq/lti.hpp"

namespace gridfreq {

enum class GenType { thermal, hydro };

std::string to_string(GenType type);

/// Tandem-compound steam unit: speed governor, speed relay, rate-limited
/// servomotor and a cascaded-lag turbine (chest -> reheater -> crossover).
/// All powers and valve positions in p.u. of machine base.
struct SteamParams {
    double gain = 20.0;              // K_G, reciprocal of the 5% droop
    double speed_reference = 0.0;    // SR, constant (no AGC)
    double t_speed_relay = 0.001;    // T_SR, s
    double t_servo = 0.15;           // T_SM, s
    double rate_open = 0.1;          // p.u./s
    double rate_close = -0.1;        // p.u./s
    double valve_max = 4.496;
    double valve_min = 0.0;
    double t_chest = 0.3;
    double t_reheat = 7.0;
    double t_crossover = 0.5;
    double f_hp = 0.3;
    double f_ip = 0.3;
    double f_lpa = 0.2;
    double f_lpb = 0.2;
    double p_max = 1.0;              // steam flow admitted to the chest is capped here
};

enum class HydroDroopFeedback { electrical_power, gate };

/// PID hydro governor with a K_a / (1 + T_a s) gate servo, feeding the
/// nonlinear water-column turbine.
struct HydroParams {
    double kp = 1.163;
    double ki = 0.105;
    double kd = 0.0;
    double td = 0.01;                // derivative filter, s
    double ka = 3.33;
    double ta = 0.07;
    double permanent_droop = 0.05;   // R_p
    HydroDroopFeedback feedback = HydroDroopFeedback::electrical_power;
    double gate_min = 0.0;
    double gate_max = 1.0;
    double water_time = 1.0;         // T_w, s
    double no_load_flow = 0.08;      // q_nl
    double turbine_gain = 0.0;       // A_t; 0 selects 1 / (1 - q_nl)
    double gate_floor = 0.01;

    double at() const { return turbine_gain > 0.0 ? turbine_gain : 1.0 / (1.0 - no_load_flow); }
};

struct MachineParams {
    GenType type = GenType::hydro;
    double inertia = 3.5;            // H, s on machine base
    double damping = 1.0;            // D, p.u. on machine base
    double x_coupling = 0.3;         // p.u. on machine base
    SteamParams steam;
    HydroParams hydro;
};

MachineParams default_machine_params(GenType type);

struct SteamGovState {
    double p_ref = 0.0;              // load reference fed in beside the speed error
    double relay = 0.0;              // speed-relay output
    double valve = 0.0;              // C_v
    double chest = 0.0;
    double reheat = 0.0;
    double crossover = 0.0;
};

struct HydroGovState {
    double p_ref = 0.0;              // electrical power reference, p.u.
    double gate_ref = 0.0;
    double integrator = 0.0;
    double deriv_filter = 0.0;
    double command = 0.0;            // PID output last step
    double servo_velocity = 0.0;
    double gate = 0.0;
    double flow = 0.0;               // q
    std::uint64_t gate_floor_hits = 0;
};

struct MachineState {
    double delta = 0.0;              // rad
    double dw = 0.0;                 // speed deviation, p.u.
    double pm = 0.0;                 // p.u. machine base
    double pe = 0.0;                 // p.u. machine base
    std::variant<SteamGovState, HydroGovState> governor;
    bool online = true;
};

// --- steam ---------------------------------------------------------------

/// Valve-opening demand produced by the speed governor, K_G (SR - dw).
double steam_governor_demand(const SteamParams& p, double dw);

SteamGovState steam_governor_step(const SteamParams& p, SteamGovState s, double dw, double dt);

/// Precomputed exact step of the turbine stage cascade for a fixed dt.
class SteamTurbineStep {
public:
    SteamTurbineStep(const SteamParams& p, double dt);
    /// Advances the stages assuming the admitted flow moves linearly
    /// between the two valve positions across the step.
    SteamGovState operator()(SteamGovState s, double valve_start, double valve_end) const;
    double dt() const { return dt_; }

private:
    SteamParams params_;
    double dt_;
    LinearStep step_;
};

/// Convenience form: valve held at its current position over the step.
SteamGovState steam_turbine_step(const SteamParams& p, SteamGovState s, double dt);
double steam_power(const SteamParams& p, const SteamGovState& s);
SteamGovState steam_equilibrium(const SteamParams& p, double pm);

// --- hydro ---------------------------------------------------------------

class HydroServoStep {
public:
    HydroServoStep(const HydroParams& p, double dt);
    const LinearStep& step() const { return step_; }
    double dt() const { return dt_; }

private:
    double dt_;
    LinearStep step_;
};

/// dpe is the electrical power deviation from p_ref (p.u. machine base).
HydroGovState hydro_governor_step(const HydroParams& p, const HydroServoStep& servo, HydroGovState s,
                                  double dw, double dpe);
HydroGovState hydro_governor_step(const HydroParams& p, HydroGovState s, double dw, double dpe, double dt);

/// Integrates the water column over dt with the gate moving linearly from
/// gate_start to the state's current gate.
HydroGovState hydro_turbine_step(const HydroParams& p, HydroGovState s, double gate_start, double dt);
HydroGovState hydro_turbine_step(const HydroParams& p, HydroGovState s, double dt);
double hydro_power(const HydroParams& p, const HydroGovState& s);
double hydro_head(const HydroParams& p, double flow, double gate);
HydroGovState hydro_equilibrium(const HydroParams& p, double pm);

// --- rotor ---------------------------------------------------------------

inline double swing_acceleration(double pm, double pe, double dw, double h, double d) {
    return (pm - pe - d * dw) / (2.0 * h);
}

/// One RK4 step of 2H d(dw)/dt = pm - pe - D dw, d(delta)/dt = omega_s dw,
/// with pm and pe held over the step.
MachineState swing_step(MachineState m, double pm, double pe, double h, double d, double dt,
                        double omega_s);

}  // namespace gridfreq
