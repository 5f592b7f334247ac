#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "gridfreq/error.hpp"
#include "gridfreq/protection.hpp"

using namespace gridfreq;

namespace {

constexpr double f0 = 60.0;
constexpr double dt = 0.01;

// Feeds a constant frequency for n samples and returns the sample index
// (1-based) at which the committed level first changed, or 0.
int first_change(UflsRelayState& r, double f, int n) {
    const double start = r.level;
    for (int k = 1; k <= n; ++k) {
        r = ufls_step(r, f, dt);
        if (r.level != start) {
            return k;
        }
    }
    return 0;
}

UflsRelayState relay_at(double level) {
    UflsRelayState r;
    r.f0 = f0;
    r.level = level;
    r.candidate = level;
    return r;
}

// Reference relay written from the table, independent of the library:
// piecewise staircase, hysteretic restoration and a persistence counter.
struct ReferenceRelay {
    double level = 0.0;
    double pending_target = -1.0;
    int count = 0;

    static double table_shed(double drop) {
        if (drop <= 1.0) return 0.0;
        if (drop < 1.2) return 0.05;
        if (drop < 1.4) return 0.15;
        if (drop < 1.6) return 0.25;
        if (drop < 1.8) return 0.35;
        if (drop < 2.0) return 0.45;
        return 0.50;
    }

    double target(double f) const {
        const double drop = f0 - f;
        if (drop > 1.0) {
            return std::max(level, table_shed(drop));
        }
        if (drop <= 0.25) return 0.0;
        if (drop <= 0.5) return std::min(level, 0.05);
        if (drop <= 0.75) return std::min(level, 0.15);
        return level;
    }

    void feed(double f) {
        const double t = target(f);
        if (t == level) {
            pending_target = -1.0;
            count = 0;
            return;
        }
        count = t == pending_target ? count + 1 : 1;
        pending_target = t;
        if (count >= 15) {  // 0.15 s at 10 ms samples
            level = t;
            pending_target = -1.0;
            count = 0;
        }
    }
};

}  // namespace

TEST(UflsTable, ShedStaircase) {
    EXPECT_EQ(shed_level_for_frequency(60.0, f0), 0.0);
    EXPECT_EQ(shed_level_for_frequency(59.0, f0), 0.0);
    EXPECT_EQ(shed_level_for_frequency(58.99, f0), 0.05);
    EXPECT_EQ(shed_level_for_frequency(58.81, f0), 0.05);
    EXPECT_EQ(shed_level_for_frequency(58.8, f0), 0.15);
    EXPECT_EQ(shed_level_for_frequency(58.61, f0), 0.15);
    EXPECT_EQ(shed_level_for_frequency(58.6, f0), 0.25);
    EXPECT_EQ(shed_level_for_frequency(58.5, f0), 0.25);
    EXPECT_EQ(shed_level_for_frequency(58.3, f0), 0.35);
    EXPECT_EQ(shed_level_for_frequency(58.1, f0), 0.45);
    EXPECT_EQ(shed_level_for_frequency(58.0, f0), 0.50);
    EXPECT_EQ(shed_level_for_frequency(50.0, f0), 0.50);
}

TEST(UflsTable, RestorationThresholds) {
    EXPECT_EQ(restoration_level_for_frequency(59.8, f0, 0.35), 0.0);
    EXPECT_EQ(restoration_level_for_frequency(59.75, f0, 0.35), 0.0);
    EXPECT_EQ(restoration_level_for_frequency(59.6, f0, 0.35), 0.05);
    EXPECT_EQ(restoration_level_for_frequency(59.5, f0, 0.35), 0.05);
    EXPECT_EQ(restoration_level_for_frequency(59.3, f0, 0.35), 0.15);
    EXPECT_EQ(restoration_level_for_frequency(59.25, f0, 0.35), 0.15);
    EXPECT_EQ(restoration_level_for_frequency(59.1, f0, 0.35), 0.35);
    // Restoration never raises the shed level.
    EXPECT_EQ(restoration_level_for_frequency(59.3, f0, 0.05), 0.05);
}

TEST(UflsRelay, EachShedStepCommitsAfterDelay) {
    const std::pair<double, double> cases[] = {{58.95, 0.05}, {58.75, 0.15}, {58.55, 0.25},
                                               {58.35, 0.35}, {58.15, 0.45}, {57.5, 0.50}};
    for (const auto& [f, level] : cases) {
        auto r = relay_at(0.0);
        EXPECT_EQ(first_change(r, f, 100), 15) << f;
        EXPECT_EQ(r.level, level) << f;
    }
}

TEST(UflsRelay, RestorationStepsCommitAfterDelay) {
    auto r = relay_at(0.15);
    EXPECT_EQ(first_change(r, 59.3, 200), 0);  // already at the 85% band
    r = relay_at(0.25);
    EXPECT_EQ(first_change(r, 59.26, 100), 15);
    EXPECT_EQ(r.level, 0.15);
    EXPECT_EQ(first_change(r, 59.6, 100), 15);
    EXPECT_EQ(r.level, 0.05);
    EXPECT_EQ(first_change(r, 59.9, 100), 15);
    EXPECT_EQ(r.level, 0.0);
}

TEST(UflsRelay, HoldsBetweenShedAndRestoreBands) {
    auto r = relay_at(0.15);
    EXPECT_EQ(first_change(r, 59.1, 1000), 0);
    EXPECT_EQ(r.level, 0.15);
}

TEST(UflsRelay, SubDelayExcursionIgnored) {
    auto r = relay_at(0.0);
    for (int k = 0; k < 14; ++k) {
        r = ufls_step(r, 58.5, dt);
    }
    for (int k = 0; k < 100; ++k) {
        r = ufls_step(r, 59.9, dt);
    }
    EXPECT_EQ(r.level, 0.0);
}

TEST(UflsRelay, ChangedTargetRestartsTimer) {
    auto r = relay_at(0.0);
    for (int k = 0; k < 10; ++k) {
        r = ufls_step(r, 58.95, dt);
    }
    // Deeper band: a new 0.15 s wait starts here.
    EXPECT_EQ(first_change(r, 58.7, 100), 15);
    EXPECT_EQ(r.level, 0.15);
}

TEST(UflsRelay, SchemeValidation) {
    UflsScheme s;
    s.shed_level.pop_back();
    EXPECT_THROW(s.validate(), ConfigError);
    UflsScheme t;
    t.delay = -1.0;
    EXPECT_THROW(t.validate(), ConfigError);
    EXPECT_NO_THROW(entsoe_scheme().validate());
}

TEST(UflsRelay, RandomTracesMatchReferenceWithZeroViolations) {
    std::mt19937_64 rng(2024);
    const std::set<double> allowed{0.0, 0.05, 0.15, 0.25, 0.35, 0.45, 0.50};
    int violations = 0;
    for (int trace = 0; trace < 1000; ++trace) {
        // Piecewise-constant segments with random durations around the
        // delay; odd traces add Gaussian jitter.
        std::uniform_real_distribution<double> level(57.6, 60.2);
        std::uniform_int_distribution<int> len(1, 40);
        std::normal_distribution<double> jitter(0.0, 0.02);
        auto r = relay_at(0.0);
        ReferenceRelay ref;
        double f = 60.0;
        for (int seg = 0; seg < 60; ++seg) {
            const double base = level(rng);
            const int n = len(rng);
            for (int k = 0; k < n; ++k) {
                f = base + (trace % 2 ? jitter(rng) : 0.0);
                const double before = r.level;
                r = ufls_step(r, f, dt);
                ref.feed(f);
                if (r.level != ref.level || !allowed.count(r.level)) {
                    ++violations;
                }
                // Shedding never relaxes below the first threshold; restoration
                // never deepens above it.
                if (f < f0 - 1.0 && r.level < before) {
                    ++violations;
                }
                if (f >= f0 - 1.0 && r.level > before) {
                    ++violations;
                }
            }
        }
    }
    EXPECT_EQ(violations, 0);
}

TEST(FrequencyEstimator, FirstSampleIsNominal) {
    FrequencyEstimator e{60.0, 0.05, {}, 0.0};
    EXPECT_EQ(estimate_bus_frequency(e, 1.234, dt), 60.0);
}

TEST(FrequencyEstimator, ConvergesOnAngleRampWithLagResponse) {
    FrequencyEstimator e{60.0, 0.05, {}, 0.0};
    const double df = -0.4;
    const double w = 2.0 * std::numbers::pi * df;
    estimate_bus_frequency(e, 0.0, dt);
    for (int k = 1; k <= 100; ++k) {
        const double f = estimate_bus_frequency(e, w * k * dt, dt);
        const double expected = 60.0 + df * (1.0 - std::exp(-k * dt / 0.05));
        ASSERT_NEAR(f, expected, 1e-9) << k;
    }
}

TEST(FrequencyEstimator, ZeroTimeConstantIsRawDerivative) {
    FrequencyEstimator e{50.0, 0.0, {}, 0.0};
    estimate_bus_frequency(e, 0.0, dt);
    EXPECT_NEAR(estimate_bus_frequency(e, 2.0 * std::numbers::pi * 0.1 * dt, dt), 50.1, 1e-12);
}
