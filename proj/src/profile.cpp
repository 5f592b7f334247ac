#include "gridfreq/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "gridfreq/error.hpp"

namespace gridfreq {

std::string to_string(SeriesKind kind) {
    switch (kind) {
    case SeriesKind::wind:
        return "wind";
    case SeriesKind::load:
        return "load";
    case SeriesKind::battery:
        return "battery";
    }
    return "unknown";
}

double SecondSeries::at(double t) const {
    if (values.empty()) {
        return 0.0;
    }
    const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t + 1e-9)));
    return values[std::min(k, values.size() - 1)];
}

std::vector<double> draw_increments(const MinuteSeries& x, const NoiseParams& p) {
    if (x.values.size() < 2) {
        throw ConfigError("resampling needs at least two minute samples");
    }
    if (p.sigma < 0.0) {
        throw ConfigError("sigma must be non-negative");
    }
    std::mt19937_64 rng(p.seed);
    std::vector<double> out;
    out.reserve((x.values.size() - 1) * seconds_per_minute);
    for (std::size_t t = 0; t + 1 < x.values.size(); ++t) {
        const double slope = (x.values[t + 1] - x.values[t]) / seconds_per_minute;
        if (p.sigma == 0.0) {
            out.insert(out.end(), seconds_per_minute, slope);
            continue;
        }
        std::normal_distribution<double> dist(slope, p.sigma);
        for (int s = 0; s < seconds_per_minute; ++s) {
            out.push_back(dist(rng));
        }
    }
    return out;
}

SecondSeries resample_minutes(const MinuteSeries& x, const NoiseParams& p, double lo, double hi) {
    const auto inc = draw_increments(x, p);
    const std::size_t minutes = x.values.size() - 1;
    SecondSeries out;
    out.values.reserve(minutes * seconds_per_minute + 1);
    for (std::size_t t = 0; t < minutes; ++t) {
        // Each minute restarts from its own source sample.
        double level = x.values[t];
        for (int s = 0; s < seconds_per_minute; ++s) {
            if (s > 0) {
                level += inc[t * seconds_per_minute + static_cast<std::size_t>(s) - 1];
            }
            out.values.push_back(std::clamp(level, lo, hi));
        }
    }
    out.values.push_back(std::clamp(x.values.back(), lo, hi));
    return out;
}

SecondSeries resample_wind(const MinuteSeries& x, const NoiseParams& p) {
    auto s = resample_minutes(x, p, 0.0, 1.0);
    s.kind = SeriesKind::wind;
    return s;
}

SecondSeries resample_load(const MinuteSeries& x, const NoiseParams& p) {
    auto s = resample_minutes(x, p, 0.0, std::numeric_limits<double>::infinity());
    s.kind = SeriesKind::load;
    return s;
}

SecondSeries scale_wind(const SecondSeries& per_unit, double rating_mw) {
    if (!(rating_mw > 0.0)) {
        throw ConfigError("wind rating must be positive");
    }
    SecondSeries out = per_unit;
    out.kind = SeriesKind::wind;
    out.baseline = rating_mw;
    for (double& v : out.values) {
        v *= rating_mw;
    }
    return out;
}

SecondSeries make_load_profile(const SecondSeries& per_unit, double forecast_mw) {
    if (!(forecast_mw > 0.0)) {
        throw ConfigError("load forecast must be positive");
    }
    SecondSeries out = per_unit;
    out.kind = SeriesKind::load;
    out.baseline = forecast_mw;
    for (double& v : out.values) {
        v *= forecast_mw;
    }
    return out;
}

MinuteSeries synthetic_minutes(std::size_t count, const WalkParams& walk, std::uint64_t seed) {
    if (walk.lo > walk.hi || walk.start < walk.lo || walk.start > walk.hi) {
        throw ConfigError("random walk start must lie within [lo, hi]");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, walk.step_sd > 0.0 ? walk.step_sd : 1.0);
    MinuteSeries out;
    out.values.reserve(count);
    double x = walk.start;
    for (std::size_t i = 0; i < count; ++i) {
        out.values.push_back(x);
        if (walk.step_sd <= 0.0) {
            continue;
        }
        x += step(rng);
        // Reflect back into range; a step larger than the band is clamped.
        if (x > walk.hi) {
            x = 2.0 * walk.hi - x;
        }
        if (x < walk.lo) {
            x = 2.0 * walk.lo - x;
        }
        x = std::clamp(x, walk.lo, walk.hi);
    }
    return out;
}

namespace {

std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
}

bool parse_double(const std::string& s, double& out) {
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

MinuteSeries read_minute_csv(const std::filesystem::path& path, double lo, double hi) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open '{}'", path.string()));
    }
    MinuteSeries out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ConfigError(fmt::format("{}:{}: expected 'timestamp,value'", path.string(), lineno));
        }
        const std::string value = trim(line.substr(comma + 1));
        double v = 0.0;
        if (!parse_double(value, v)) {
            if (out.values.empty() && lineno == 1) {
                continue;  // header
            }
            throw ConfigError(fmt::format("{}:{}: value '{}' is not a number", path.string(), lineno, value));
        }
        if (v < lo || v > hi) {
            throw ConfigError(fmt::format("{}:{}: value {} outside [{}, {}]", path.string(), lineno, v, lo, hi));
        }
        out.values.push_back(v);
    }
    return out;
}

void write_second_csv(const SecondSeries& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(fmt::format("cannot write '{}'", path.string()));
    }
    out << "time_s,value\n";
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        out << k << ',' << fmt::format("{}", s.values[k]) << '\n';
    }
}

std::size_t minutes_for_horizon(double duration_s) {
    return static_cast<std::size_t>(std::ceil(duration_s / seconds_per_minute)) + 1;
}

}  // namespace gridfreq
