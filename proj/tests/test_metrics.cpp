#include <cmath>

#include <gtest/gtest.h>

#include "fxlab/error.hpp"
#include "fxlab/metrics.hpp"
#include "support.hpp"

using namespace fxlab;
using namespace fxlab::metrics;

namespace {

MetricSeries series(std::vector<double> v) {
    MetricSeries s;
    s.window = 1;
    s.values = std::move(v);
    s.status.assign(s.values.size(), PointStatus::Ok);
    return s;
}

} // namespace

TEST(NoiseReduction, Examples) {
    fxtest::Gen gen(91);
    const auto d = gen.vec(1000);
    const auto same = noise_reduction_db(d, d, 100);
    EXPECT_EQ(same.whole_run_db, 0.0);
    for (double v : same.per_window.values)
        EXPECT_EQ(v, 0.0);

    std::vector<double> e(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        e[i] = d[i] / 10.0;
    EXPECT_NEAR(noise_reduction_db(e, d, 100).whole_run_db, 20.0, 1e-12);

    const auto zero = noise_reduction_db(std::vector<double>(1000, 0.0), d, 100);
    EXPECT_EQ(zero.whole_run_db, kCapDb);
    EXPECT_EQ(zero.whole_run_status, PointStatus::Saturated);
    EXPECT_EQ(zero.per_window.status[0], PointStatus::Saturated);
}

TEST(NoiseReduction, UndefinedWindowsAndShape) {
    std::vector<double> d(250, 1.0);
    for (std::size_t i = 100; i < 200; ++i)
        d[i] = 0.0;
    const std::vector<double> e(250, 0.5);
    const auto r = noise_reduction_db(e, d, 100);
    ASSERT_EQ(r.per_window.size(), 2u); // the trailing partial window is dropped
    EXPECT_EQ(r.per_window.status[0], PointStatus::Ok);
    EXPECT_FALSE(r.per_window.defined(1));
    EXPECT_TRUE(std::isnan(r.per_window.values[1]));
    EXPECT_THROW(noise_reduction_db(e, std::vector<double>(10, 1.0), 5), ValidationError);
    EXPECT_THROW(noise_reduction_db(e, d, 0), ValidationError);
    EXPECT_THROW(noise_reduction_db(e, d, 251), ValidationError);
}

TEST(NoiseReduction, ScaleInvariant) {
    fxtest::Gen gen(92);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = gen.index(10, 500);
        const auto e = gen.vec(n);
        const auto d = gen.vec(n);
        const double c = gen.uniform(0.01, 100) * (gen.uniform(0, 1) < 0.5 ? -1 : 1);
        std::vector<double> ce(n), cd(n);
        for (std::size_t i = 0; i < n; ++i) {
            ce[i] = c * e[i];
            cd[i] = c * d[i];
        }
        const std::size_t w = gen.index(1, n);
        const auto a = noise_reduction_db(e, d, w);
        const auto b = noise_reduction_db(ce, cd, w);
        EXPECT_NEAR(a.whole_run_db, b.whole_run_db, 1e-9);
        for (std::size_t i = 0; i < a.per_window.size(); ++i)
            EXPECT_NEAR(a.per_window.values[i], b.per_window.values[i], 1e-9);
    }
}

TEST(Convergence, Constants) {
    for (double v : convergence_curve(std::vector<double>(500, 1.0), 200).values)
        EXPECT_EQ(v, 0.0);
    for (double v : convergence_curve(std::vector<double>(500, 0.1), 200).values)
        EXPECT_NEAR(v, -20.0, 1e-12);
    for (double v : convergence_curve(std::vector<double>(50, 0.0), 10).values)
        EXPECT_EQ(v, -kCapDb);
}

TEST(Convergence, ExponentialDecayIsALine) {
    const double rho = 0.995;
    std::vector<double> e(2000);
    for (std::size_t n = 0; n < e.size(); ++n)
        e[n] = std::pow(rho, static_cast<double>(n)) * (n % 2 ? -1.0 : 1.0);
    const auto c = convergence_curve(e, 1);
    // Least-squares slope over the curve.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        sx += i;
        sy += c.values[i];
        sxx += static_cast<double>(i) * i;
        sxy += i * c.values[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, 20 * std::log10(rho), 1e-9);

    // A trailing window only adds a constant offset once it is full.
    const auto smooth = convergence_curve(e, 50);
    const double offset = smooth.values[100] - c.values[100];
    for (std::size_t i = 100; i < 2000; i += 97)
        EXPECT_NEAR(smooth.values[i] - c.values[i], offset, 1e-9);
}

TEST(Convergence, ScalingShiftsByDecibels) {
    fxtest::Gen gen(93);
    for (int trial = 0; trial < 30; ++trial) {
        const auto e = gen.vec(gen.index(1, 400));
        const double c = gen.uniform(0.01, 50);
        std::vector<double> ce(e.size());
        for (std::size_t i = 0; i < e.size(); ++i)
            ce[i] = -c * e[i];
        const std::size_t w = gen.index(1, 60);
        const auto a = convergence_curve(e, w);
        const auto b = convergence_curve(ce, w);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.status[i] == PointStatus::Ok && b.status[i] == PointStatus::Ok)
                EXPECT_NEAR(b.values[i], a.values[i] + 20 * std::log10(c), 1e-9);
    }
}

TEST(IterationsToThreshold, Examples) {
    EXPECT_EQ(iterations_to_threshold(series({0, 5, 12, 13, 14}), 12), 2u);
    EXPECT_EQ(iterations_to_threshold(series({0, 5, 6}), 12), std::nullopt);
    // Dipping back below the target restarts the search.
    EXPECT_EQ(iterations_to_threshold(series({0, 13, 5, 12, 14}), 12), 3u);
    EXPECT_EQ(iterations_to_threshold(series({0, 13, 5, 12, 14}), 12, 1), 1u);
    EXPECT_EQ(iterations_to_threshold(series({0, 13, 13, 5, 14}), 12, 2), 1u);
}

TEST(IterationsToThreshold, MonotoneInTarget) {
    fxtest::Gen gen(94);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = series(gen.vec(gen.index(1, 50), -10, 10));
        const double t1 = gen.uniform(-12, 12);
        const double t2 = t1 + gen.uniform(0, 5);
        const auto a = iterations_to_threshold(s, t1);
        const auto b = iterations_to_threshold(s, t2);
        if (b)
            ASSERT_TRUE(a.has_value());
        if (a && b)
            EXPECT_LE(*a, *b);
    }
}

TEST(IterationsToThreshold, UndefinedPointsNeverCount) {
    auto s = series({13, NAN, 13});
    s.status[1] = PointStatus::Undefined;
    EXPECT_EQ(iterations_to_threshold(s, 12), 2u);
    EXPECT_EQ(window_end_iteration(MetricSeries{"r", 100, {}, {}}, 2), 300u);
}

TEST(TailMean, SkipsUndefined) {
    auto s = series({1, 2, NAN, 4});
    s.status[2] = PointStatus::Undefined;
    EXPECT_DOUBLE_EQ(tail_mean(s, 2), 3.0);
    EXPECT_DOUBLE_EQ(tail_mean(s, 10), 7.0 / 3.0);
}
