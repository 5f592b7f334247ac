#include "gridfreq/protection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridfreq/error.hpp"
#include "gridfreq/lti.hpp"

namespace gridfreq {

void UflsScheme::validate() const {
    if (shed_drop.empty() || shed_drop.size() != shed_level.size() || restore_drop.size() != restore_level.size()) {
        throw ConfigError("UFLS scheme: threshold and level lists must have matching lengths");
    }
    for (std::size_t i = 1; i < shed_drop.size(); ++i) {
        if (!(shed_drop[i] > shed_drop[i - 1]) || shed_level[i] < shed_level[i - 1]) {
            throw ConfigError("UFLS scheme: shed steps must deepen monotonically");
        }
    }
    for (std::size_t i = 1; i < restore_drop.size(); ++i) {
        if (!(restore_drop[i] > restore_drop[i - 1])) {
            throw ConfigError("UFLS scheme: restoration thresholds must increase");
        }
    }
    if (delay < 0.0) {
        throw ConfigError("UFLS scheme: delay must be non-negative");
    }
}

const UflsScheme& entsoe_scheme() {
    static const UflsScheme scheme{};
    return scheme;
}

double shed_level_for_frequency(double f, double f0, const UflsScheme& scheme) {
    if (!(f < f0 - scheme.shed_drop[0])) {
        return 0.0;
    }
    double level = scheme.shed_level[0];
    for (std::size_t i = 1; i < scheme.shed_drop.size(); ++i) {
        if (f <= f0 - scheme.shed_drop[i]) {
            level = scheme.shed_level[i];
        }
    }
    return level;
}

double restoration_level_for_frequency(double f, double f0, double current, const UflsScheme& scheme) {
    for (std::size_t i = 0; i < scheme.restore_drop.size(); ++i) {
        if (f >= f0 - scheme.restore_drop[i]) {
            return std::min(current, scheme.restore_level[i]);
        }
    }
    return current;
}

double ufls_target(const UflsRelayState& r, double f, const UflsScheme& scheme) {
    if (f < r.f0 - scheme.shed_drop[0]) {
        return std::max(r.level, shed_level_for_frequency(f, r.f0, scheme));
    }
    return restoration_level_for_frequency(f, r.f0, r.level, scheme);
}

UflsRelayState ufls_step(UflsRelayState r, double f_meas, double dt, const UflsScheme& scheme) {
    const double target = ufls_target(r, f_meas, scheme);
    if (target == r.level) {
        r.pending = false;
        r.timer = 0.0;
        r.candidate = r.level;
        return r;
    }
    if (r.pending && target == r.candidate) {
        r.timer += dt;
    } else {
        r.pending = true;
        r.candidate = target;
        r.timer = dt;
    }
    // Tolerance absorbs accumulation error in the summed step lengths.
    if (r.timer >= scheme.delay - 1e-9) {
        r.level = r.candidate;
        r.pending = false;
        r.timer = 0.0;
    }
    return r;
}

double estimate_bus_frequency(FrequencyEstimator& e, double theta, double dt) {
    if (e.last_angle) {
        const double raw = (theta - *e.last_angle) / dt;
        e.rate = lag_step(e.rate, raw, e.time_constant, dt);
    }
    e.last_angle = theta;
    return e.f0 + e.rate / (2.0 * std::numbers::pi);
}

}  // namespace gridfreq
