#pragma once

#include <optional>
#include <vector>

namespace gridfreq {

/// Under-frequency load-shedding staircase. Thresholds are frequency drops
/// below f0 in Hz; levels are absolute shed fractions of the bus demand.
struct UflsScheme {
    std::vector<double> shed_drop{1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
    std::vector<double> shed_level{0.05, 0.15, 0.25, 0.35, 0.45, 0.50};
    std::vector<double> restore_drop{0.25, 0.5, 0.75};
    std::vector<double> restore_level{0.0, 0.05, 0.15};
    double delay = 0.15;             // s, gates both shedding and restoration

    void validate() const;
};

const UflsScheme& entsoe_scheme();

/// Staircase target below f0 - shed_drop[0]; 0 at or above it. Interior
/// boundaries belong to the deeper step.
double shed_level_for_frequency(double f, double f0, const UflsScheme& scheme = entsoe_scheme());

/// Target shed level once frequency has recovered. Never raises the level;
/// below the last restoration threshold the current level is held.
double restoration_level_for_frequency(double f, double f0, double current,
                                       const UflsScheme& scheme = entsoe_scheme());

struct UflsRelayState {
    int bus = 0;
    double f0 = 60.0;
    double level = 0.0;              // committed shed fraction
    double candidate = 0.0;
    double timer = 0.0;              // s the candidate has persisted
    bool pending = false;
};

/// Target the relay is heading for at frequency f (before the delay).
double ufls_target(const UflsRelayState& r, double f, const UflsScheme& scheme = entsoe_scheme());

/// Advance one sample. The target must hold for `delay` seconds of
/// consecutive samples before the committed level moves; a changed target
/// restarts the timer.
UflsRelayState ufls_step(UflsRelayState r, double f_meas, double dt, const UflsScheme& scheme = entsoe_scheme());

/// PMU surrogate: low-passed angle derivative.
struct FrequencyEstimator {
    double f0 = 60.0;
    double time_constant = 0.05;     // s
    std::optional<double> last_angle;
    double rate = 0.0;               // filtered d(theta)/dt, rad/s
};

/// Feeds one angle sample and returns the estimate f0 + rate / (2 pi).
double estimate_bus_frequency(FrequencyEstimator& e, double theta, double dt);

}  // namespace gridfreq
