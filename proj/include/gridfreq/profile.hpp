#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace gridfreq {

/// Minute-resolution source data, p.u.
struct MinuteSeries {
    std::vector<double> values;
};

enum class SeriesKind { wind, load, battery };

std::string to_string(SeriesKind kind);

/// One-second series. Per-unit while fresh out of the resampler, MW once
/// scaled by a bus baseline.
struct SecondSeries {
    std::vector<double> values;
    int bus = 0;
    SeriesKind kind = SeriesKind::wind;
    double baseline = 1.0;           // W^b or L^b, MW (1 for per-unit series)

    /// Zero-order hold: value for the second containing t.
    double at(double t) const;
};

struct NoiseParams {
    double sigma = 0.002;            // std of per-second increments, p.u.
    std::uint64_t seed = 0;
};

inline constexpr int seconds_per_minute = 60;

/// Per-second increments, 60 per minute interval t = 1..T-1, each drawn
/// from N((x_{t+1} - x_t) / 60, sigma^2). Deterministic given the seed.
std::vector<double> draw_increments(const MinuteSeries& x, const NoiseParams& p);

/// Second-resolution series built from the minute series and the drawn
/// increments: within minute t the value at second s is x_t plus the first s
/// increments; the final sample is x_T. Clamped to [lo, hi].
/// Throws ConfigError when fewer than two minute samples are given.
SecondSeries resample_minutes(const MinuteSeries& x, const NoiseParams& p, double lo, double hi);

/// Wind flavour: per-unit output clamped to [0, 1].
SecondSeries resample_wind(const MinuteSeries& x, const NoiseParams& p);

/// Load flavour: per-unit output clamped at 0 only.
SecondSeries resample_load(const MinuteSeries& x, const NoiseParams& p);

/// W_ts = W^b * omega_ts
SecondSeries scale_wind(const SecondSeries& per_unit, double rating_mw);

/// L_ts = L^b * l_ts
SecondSeries make_load_profile(const SecondSeries& per_unit, double forecast_mw);

/// Bounded random walk (reflecting at the bounds) used as bundled source data.
struct WalkParams {
    double start = 1.0;
    double lo = 0.0;
    double hi = 1.0;
    double step_sd = 0.01;
};

MinuteSeries synthetic_minutes(std::size_t count, const WalkParams& walk, std::uint64_t seed);

/// Reads "timestamp,value" rows (optional header). Values outside [lo, hi]
/// and malformed rows are rejected with their line number.
MinuteSeries read_minute_csv(const std::filesystem::path& path, double lo = 0.0,
                             double hi = std::numeric_limits<double>::infinity());

/// Writes "time_s,value" rows at 1 s.
void write_second_csv(const SecondSeries& s, const std::filesystem::path& path);

/// Minute samples needed to cover a horizon in seconds.
std::size_t minutes_for_horizon(double duration_s);

}  // namespace gridfreq
