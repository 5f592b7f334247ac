#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "gridfreq/profile.hpp"

namespace gridfreq {

/// Piecewise-linear CDF of the relative battery tracking error.
class ErrorCdf {
public:
    /// Throws ConfigError unless epsilon is strictly increasing and the
    /// probabilities rise monotonically from 0 to 1.
    ErrorCdf(std::vector<double> epsilon, std::vector<double> probability);

    /// Inverse CDF with linear interpolation between breakpoints.
    double quantile(double u) const;

    const std::vector<double>& epsilon() const { return eps_; }
    const std::vector<double>& probability() const { return prob_; }

    /// Cumulative probability at e, for goodness-of-fit checks.
    double cdf(double e) const;

private:
    std::vector<double> eps_;
    std::vector<double> prob_;
};

/// Ideal tracking: epsilon = 0 always.
ErrorCdf ideal_error_cdf();

/// Stand-in with zero mean and +/-5% support. Not measured data.
ErrorCdf placeholder_error_cdf();

/// Two-column CSV: epsilon,cumulative_probability (header optional).
ErrorCdf read_error_cdf_csv(const std::filesystem::path& path);

double sample_error(const ErrorCdf& cdf, std::mt19937_64& rng);

/// B* = (W^b - L^b) - (W_ts - L_ts): battery power that holds the bus at its
/// scheduled net injection.
inline double ideal_battery_injection(double wind_forecast, double load_forecast, double wind, double load) {
    return (wind_forecast - load_forecast) - (wind - load);
}

/// B = B* (1 + eps)
inline double perturb_injection(double ideal, double eps) {
    return ideal * (1.0 + eps);
}

struct BatterySeries {
    int bus = 0;
    double schedule_mw = 0.0;        // W^b - L^b
    std::vector<double> ideal;       // B*, MW per second
    std::vector<double> eps;
    std::vector<double> injection;   // B, MW per second
};

struct BatteryOptions {
    double hold_interval_s = 1.0;    // eps redrawn every this many seconds
    std::optional<double> power_cap_mw;
};

/// Battery series for one dispatched bus. Either profile may be absent
/// (nullptr) when the bus has no wind or no load.
BatterySeries make_battery_series(int bus, double wind_forecast, double load_forecast, const SecondSeries* wind,
                                  const SecondSeries* load, std::size_t seconds, const ErrorCdf& cdf,
                                  std::uint64_t seed, const BatteryOptions& options = {});

}  // namespace gridfreq
