#include "gridfreq/dispatch.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "gridfreq/error.hpp"

namespace gridfreq {

ErrorCdf::ErrorCdf(std::vector<double> epsilon, std::vector<double> probability)
    : eps_(std::move(epsilon)), prob_(std::move(probability)) {
    if (eps_.empty() || eps_.size() != prob_.size()) {
        throw ConfigError("error CDF needs matching, non-empty epsilon and probability columns");
    }
    for (std::size_t k = 0; k < eps_.size(); ++k) {
        if (!std::isfinite(eps_[k]) || prob_[k] < 0.0 || prob_[k] > 1.0) {
            throw ConfigError(fmt::format("error CDF row {}: invalid breakpoint ({}, {})", k, eps_[k], prob_[k]));
        }
        if (k > 0 && !(eps_[k] > eps_[k - 1])) {
            throw ConfigError(fmt::format("error CDF row {}: epsilon not strictly increasing", k));
        }
        if (k > 0 && prob_[k] < prob_[k - 1]) {
            throw ConfigError(fmt::format("error CDF row {}: cumulative probability decreases", k));
        }
    }
    if (prob_.back() != 1.0) {
        throw ConfigError("error CDF must end at probability 1");
    }
    if (eps_.size() > 1 && prob_.front() != 0.0) {
        throw ConfigError("error CDF must start at probability 0");
    }
}

double ErrorCdf::quantile(double u) const {
    if (eps_.size() == 1 || u <= prob_.front()) {
        return eps_.front();
    }
    if (u >= 1.0) {
        return eps_.back();
    }
    const auto it = std::lower_bound(prob_.begin(), prob_.end(), u);
    const auto j = static_cast<std::size_t>(it - prob_.begin());
    const auto k = j - 1;
    const double w = (u - prob_[k]) / (prob_[j] - prob_[k]);
    return eps_[k] + w * (eps_[j] - eps_[k]);
}

double ErrorCdf::cdf(double e) const {
    if (e < eps_.front()) {
        return 0.0;
    }
    if (e >= eps_.back()) {
        return 1.0;
    }
    const auto it = std::upper_bound(eps_.begin(), eps_.end(), e);
    const auto j = static_cast<std::size_t>(it - eps_.begin());
    const auto k = j - 1;
    const double w = (e - eps_[k]) / (eps_[j] - eps_[k]);
    return prob_[k] + w * (prob_[j] - prob_[k]);
}

ErrorCdf ideal_error_cdf() {
    return ErrorCdf({0.0}, {1.0});
}

ErrorCdf placeholder_error_cdf() {
    return ErrorCdf({-0.05, -0.02, 0.0, 0.02, 0.05}, {0.0, 0.2, 0.5, 0.8, 1.0});
}

ErrorCdf read_error_cdf_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open error CDF '{}'", path.string()));
    }
    std::vector<double> eps;
    std::vector<double> prob;
    std::string line;
    int lineno = 0;
    auto parse = [](std::string s, double& v) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc() && p == s.data() + s.size();
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') {
            continue;
        }
        const auto comma = line.find(',');
        double e = 0.0;
        double f = 0.0;
        if (comma == std::string::npos || !parse(line.substr(0, comma), e) || !parse(line.substr(comma + 1), f)) {
            if (lineno == 1 && eps.empty()) {
                continue;  // header
            }
            throw ConfigError(fmt::format("{}:{}: expected 'epsilon,cumulative_probability'", path.string(), lineno));
        }
        eps.push_back(e);
        prob.push_back(f);
    }
    try {
        return ErrorCdf(std::move(eps), std::move(prob));
    } catch (const ConfigError& err) {
        throw ConfigError(fmt::format("{}: {}", path.string(), err.what()));
    }
}

double sample_error(const ErrorCdf& cdf, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return cdf.quantile(u(rng));
}

BatterySeries make_battery_series(int bus, double wind_forecast, double load_forecast, const SecondSeries* wind,
                                  const SecondSeries* load, std::size_t seconds, const ErrorCdf& cdf,
                                  std::uint64_t seed, const BatteryOptions& options) {
    if (!(options.hold_interval_s > 0.0)) {
        throw ConfigError("dispatch error hold interval must be positive");
    }
    BatterySeries out;
    out.bus = bus;
    out.schedule_mw = wind_forecast - load_forecast;
    out.ideal.resize(seconds);
    out.eps.resize(seconds);
    out.injection.resize(seconds);

    std::mt19937_64 rng(seed);
    double eps = 0.0;
    double next_draw = 0.0;
    for (std::size_t k = 0; k < seconds; ++k) {
        const double t = static_cast<double>(k);
        if (t + 1e-9 >= next_draw) {
            eps = sample_error(cdf, rng);
            next_draw += options.hold_interval_s;
        }
        const double w = wind ? wind->at(t) : 0.0;
        const double l = load ? load->at(t) : 0.0;
        const double ideal = ideal_battery_injection(wind_forecast, load_forecast, w, l);
        double b = perturb_injection(ideal, eps);
        if (options.power_cap_mw) {
            b = std::clamp(b, -*options.power_cap_mw, *options.power_cap_mw);
        }
        out.ideal[k] = ideal;
        out.eps[k] = eps;
        out.injection[k] = b;
    }
    return out;
}

}  // namespace gridfreq
