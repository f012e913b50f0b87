#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fxlab/anc.hpp"
#include "fxlab/error.hpp"
#include "fxlab/scenario.hpp"
#include "support.hpp"

using namespace fxlab;
using namespace fxlab::anc;
using paths::FirFilter;
using signals::SignalBuffer;

namespace {

SignalBuffer white(std::uint64_t seed, std::size_t n) {
    return SignalBuffer{signals::gaussian_noise(seed, n, 1.0)};
}

std::vector<double> taps(const FirFilter& f) {
    return {f.taps().begin(), f.taps().end()};
}

// Least-squares fit of P/S on one long white-noise realization: regress P{x}
// onto delayed copies of S{x}.
std::vector<double> empirical_wiener(const FirFilter& p, const FirFilter& s, std::size_t order) {
    const std::size_t n = 60000;
    const auto x = white(2024, n);
    const auto d = paths::filter_buffer(p, x).samples;
    const auto sx = paths::filter_buffer(s, x).samples;
    Eigen::MatrixXd a(n, order);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b(i) = d[i];
        for (std::size_t k = 0; k < order; ++k)
            a(i, k) = i >= k ? sx[i - k] : 0.0;
    }
    Eigen::VectorXd w = a.colPivHouseholderQr().solve(b);
    return {w.data(), w.data() + order};
}

scenario::PreparedScenario bundled(std::size_t iterations) {
    auto doc = scenario::load_config_document(fxtest::bundled_scenario());
    doc["iterations"] = iterations;
    const auto cfg = scenario::parse_scenario(doc, fxtest::bundled_scenario().parent_path());
    return scenario::prepare(cfg);
}

ControllerConfig bundled_controller(ControllerKind kind) {
    auto doc = scenario::load_config_document(fxtest::bundled_scenario());
    const auto cfg = scenario::parse_scenario(doc, fxtest::bundled_scenario().parent_path());
    for (const auto& c : cfg.controllers)
        if (c.config.kind == kind)
            return c.config;
    throw std::runtime_error("controller kind not in bundled scenario");
}

} // namespace

TEST(MuEffective, Examples) {
    EXPECT_EQ(mu_effective(0.01, 0.0, 0.95, 0.2), 0.01);
    EXPECT_NEAR(mu_effective(0.01, 0.5, 0.95, 0.2), 0.02, 1e-15);
    EXPECT_NEAR(mu_effective(0.01, -0.5, 0.95, 0.2), 0.02, 1e-15);
    EXPECT_NEAR(mu_effective(0.01, 0.99, 0.95, 0.2), 0.2, 1e-15);
    EXPECT_EQ(mu_effective(0.01, 0.99, 0.95, 0.1), 0.1);
}

TEST(MuEffective, MonotoneAndBounded) {
    fxtest::Gen gen(61);
    for (int trial = 0; trial < 200; ++trial) {
        const double mu = gen.uniform(0, 0.05);
        const double clamp = gen.uniform(0, 0.99);
        const double cap = gen.uniform(mu, 1.0);
        double prev = 0.0;
        for (double e = 0.0; e < 3.0; e += 0.01) {
            const double m = mu_effective(mu, e, clamp, cap);
            EXPECT_GE(m, prev);
            EXPECT_LE(m, cap);
            prev = m;
        }
    }
}

TEST(Features, KindsImplyFlags) {
    EXPECT_EQ(default_features(ControllerKind::Fxlms), (FeatureFlags{false, false, false}));
    EXPECT_EQ(default_features(ControllerKind::FxlmsFixedThreshold), (FeatureFlags{true, false, false}));
    EXPECT_EQ(default_features(ControllerKind::FxlmsVariable), (FeatureFlags{true, true, true}));
    for (auto k : {ControllerKind::LmsDirect, ControllerKind::Fxlms,
                   ControllerKind::FxlmsFixedThreshold, ControllerKind::FxlmsVariable})
        EXPECT_EQ(controller_kind_from_string(to_string(k)), k);
}

TEST(FxlmsStep, FirstStepFromZero) {
    auto cfg = ControllerConfig::for_kind(ControllerKind::Fxlms);
    cfg.taps = 4;
    const FirFilter s({1.0});
    ControllerState st(cfg, s, s);
    const auto r = fxlms_step(st, cfg, 0.8, 0.3, s, s);
    EXPECT_EQ(r.y, 0.0);
    EXPECT_EQ(r.e, 0.3);
    EXPECT_EQ(st.w[0], cfg.mu_base * 0.3 * 0.8);
    for (std::size_t k = 1; k < 4; ++k)
        EXPECT_EQ(st.w[k], 0.0);
    EXPECT_EQ(r.lambda_eff, 0.0);
    EXPECT_EQ(r.mu_eff, cfg.mu_base);
}

TEST(FxlmsStep, QuiescentFixedPoint) {
    for (auto kind : {ControllerKind::Fxlms, ControllerKind::FxlmsVariable}) {
        auto cfg = ControllerConfig::for_kind(kind);
        const auto s = paths::builtin_filter("secondary-default");
        ControllerState st(cfg, s, s);
        const auto x = white(3, 500);
        for (double xn : x.samples) {
            const auto r = fxlms_step(st, cfg, xn, 0.0, s, s);
            EXPECT_EQ(r.e, 0.0);
        }
        for (double w : st.w)
            EXPECT_EQ(w, 0.0);
    }
}

TEST(FxlmsStep, ConvergesToDelayedImpulse) {
    const auto p = paths::builtin_filter("delay-2");
    const FirFilter s({1.0});
    auto cfg = ControllerConfig::for_kind(ControllerKind::Fxlms);
    cfg.mu_base = 0.01;
    const auto trace = run_simulation(make_inputs(white(17, 5000), p, s, s), cfg);
    ASSERT_TRUE(trace.ok());
    const auto oracle = wiener_oracle(p, s, cfg.taps);
    for (std::size_t k = 0; k < cfg.taps; ++k) {
        EXPECT_NEAR(trace.final_taps[k], k == 2 ? 1.0 : 0.0, 1e-2);
        EXPECT_NEAR(trace.final_taps[k], oracle.taps.taps()[k], 1e-2);
    }
}

TEST(FxlmsStep, GradientMatchesFiniteDifferences) {
    fxtest::Gen gen(71);
    for (int trial = 0; trial < 20; ++trial) {
        auto cfg = ControllerConfig::for_kind(ControllerKind::Fxlms);
        cfg.taps = gen.index(2, 12);
        const FirFilter s(gen.vec(gen.index(1, 6)));
        ControllerState st(cfg, s, s);
        st.w = gen.vec(cfg.taps);
        st.mu_base = 0.0;
        const std::size_t warm = gen.index(20, 60);
        std::vector<double> xs;
        for (std::size_t n = 0; n < warm; ++n) {
            xs.push_back(gen.uniform(-1, 1));
            fxlms_step(st, cfg, xs.back(), gen.uniform(-1, 1), s, s);
        }
        xs.push_back(gen.uniform(-1, 1));
        const double d = gen.uniform(-1, 1);

        // e(w) with w held fixed over the secondary-path memory.
        auto error_of = [&](const std::vector<double>& w) {
            const std::size_t n = xs.size() - 1;
            double yp = 0.0;
            for (std::size_t j = 0; j < s.size() && j <= n; ++j) {
                double y = 0.0;
                for (std::size_t k = 0; k < w.size() && k <= n - j; ++k)
                    y += w[k] * xs[n - j - k];
                yp += s.taps()[j] * y;
            }
            return d - yp;
        };

        const auto w0 = st.w;
        const double mu = gen.uniform(1e-3, 1e-1);
        st.mu_base = mu;
        fxlms_step(st, cfg, xs.back(), d, s, s);
        for (std::size_t k = 0; k < w0.size(); ++k) {
            const double h = 1e-6;
            auto wp = w0, wm = w0;
            wp[k] += h;
            wm[k] -= h;
            const double ep = error_of(wp), em = error_of(wm);
            const double grad = (ep * ep - em * em) / (2 * h);
            const double expected = -0.5 * mu * grad;
            const double actual = st.w[k] - w0[k];
            EXPECT_LE(std::abs(actual - expected), 1e-6 * std::max(std::abs(expected), 1e-3))
                << "trial " << trial << " tap " << k;
        }
    }
}

TEST(FxlmsStep, ScaleCovarianceWhenFrozen) {
    fxtest::Gen gen(72);
    for (int trial = 0; trial < 20; ++trial) {
        auto cfg = ControllerConfig::for_kind(ControllerKind::Fxlms);
        cfg.taps = 8;
        cfg.mu_base = 0.0;
        const FirFilter s(gen.vec(4));
        const auto w = gen.vec(8);
        const double c = gen.uniform(0.1, 10);
        ControllerState a(cfg, s, s), b(cfg, s, s);
        a.w = w;
        b.w = w;
        for (int n = 0; n < 100; ++n) {
            const double x = gen.uniform(-1, 1), d = gen.uniform(-1, 1);
            const double ea = fxlms_step(a, cfg, x, d, s, s).e;
            const double eb = fxlms_step(b, cfg, c * x, c * d, s, s).e;
            EXPECT_NEAR(eb, c * ea, 1e-12 * c);
        }
    }
}

TEST(FxlmsStep, MuStaysBaseWithoutVariableStep) {
    auto cfg = ControllerConfig::for_kind(ControllerKind::FxlmsFixedThreshold);
    const auto s = paths::builtin_filter("secondary-default");
    const auto trace = run_simulation(make_inputs(white(4, 2000), paths::builtin_filter("primary-default"), s, s), cfg);
    for (double m : trace.mu_eff)
        EXPECT_EQ(m, cfg.mu_base);
    for (double l : trace.lambda_eff)
        EXPECT_EQ(l, cfg.threshold.base_lambda);
}

TEST(RunSimulation, FrozenZeroControllerPassesDisturbance) {
    const auto prepared = bundled(3000);
    for (auto kind : {ControllerKind::LmsDirect, ControllerKind::Fxlms}) {
        auto cfg = ControllerConfig::for_kind(kind);
        cfg.mu_base = 0.0;
        auto inputs = prepared.inputs;
        inputs.secondary_noise.clear();
        const auto trace = run_simulation(inputs, cfg);
        ASSERT_EQ(trace.size(), inputs.d.size());
        EXPECT_EQ(trace.e, inputs.d.samples);
    }
}

TEST(RunSimulation, SeriesShareLength) {
    const auto prepared = bundled(4000);
    const auto trace = run_simulation(prepared.inputs, bundled_controller(ControllerKind::FxlmsVariable));
    EXPECT_EQ(trace.y.size(), trace.size());
    EXPECT_EQ(trace.y_prime.size(), trace.size());
    EXPECT_EQ(trace.lambda_eff.size(), trace.size());
    EXPECT_EQ(trace.mu_eff.size(), trace.size());
    EXPECT_EQ(trace.size(), 4000u);
}

TEST(RunSimulation, DivergenceKeepsPartialTrace) {
    const auto prepared = bundled(5000);
    auto cfg = ControllerConfig::for_kind(ControllerKind::Fxlms);
    cfg.mu_base = 50.0;
    const auto trace = run_simulation(prepared.inputs, cfg);
    ASSERT_FALSE(trace.ok());
    EXPECT_EQ(trace.size(), trace.divergence->iteration);
    EXPECT_EQ(trace.mu_eff.size(), trace.size());
    EXPECT_LT(trace.size(), 5000u);
}

TEST(RunSimulation, DegenerateFlagsAreBitIdentical) {
    const auto prepared = bundled(10000);
    const auto classic = run_simulation(prepared.inputs, bundled_controller(ControllerKind::Fxlms));
    const auto fixed = run_simulation(prepared.inputs, bundled_controller(ControllerKind::FxlmsFixedThreshold));

    auto no_threshold = bundled_controller(ControllerKind::FxlmsVariable);
    no_threshold.features = {false, false, false};
    const auto a = run_simulation(prepared.inputs, no_threshold);
    EXPECT_EQ(a.e, classic.e);
    EXPECT_EQ(a.final_taps, classic.final_taps);

    auto fixed_like = bundled_controller(ControllerKind::FxlmsVariable);
    fixed_like.features = {true, false, false};
    const auto b = run_simulation(prepared.inputs, fixed_like);
    EXPECT_EQ(b.e, fixed.e);
    EXPECT_EQ(b.y_prime, fixed.y_prime);
    EXPECT_EQ(b.final_taps, fixed.final_taps);
}

TEST(RunSimulation, StabilityEnvelope) {
    const auto prepared = bundled(50000);
    for (auto kind : {ControllerKind::LmsDirect, ControllerKind::Fxlms,
                      ControllerKind::FxlmsFixedThreshold, ControllerKind::FxlmsVariable}) {
        const auto trace = run_simulation(prepared.inputs, bundled_controller(kind));
        EXPECT_TRUE(trace.ok()) << to_string(kind);
        EXPECT_EQ(trace.size(), 50000u);
    }
    const auto shorter = bundled(5000);
    auto cfg = bundled_controller(ControllerKind::Fxlms);
    bool diverged = false;
    for (int doubling = 0; doubling < 30 && !diverged; ++doubling) {
        cfg.mu_base *= 2.0;
        diverged = !run_simulation(shorter.inputs, cfg).ok();
    }
    EXPECT_TRUE(diverged);
}

TEST(Wiener, Examples) {
    const auto delta2 = paths::builtin_filter("delay-2");
    const FirFilter id({1.0});
    const auto a = wiener_oracle(delta2, id, 6);
    EXPECT_EQ(taps(a.taps), (std::vector<double>{0, 0, 1, 0, 0, 0}));
    EXPECT_NEAR(a.residual_power, 0.0, 1e-15);

    const FirFilter s({0.8, -0.3, 0.1});
    const auto b = wiener_oracle(s, s, 5);
    for (std::size_t k = 0; k < 5; ++k)
        EXPECT_NEAR(b.taps.taps()[k], k == 0 ? 1.0 : 0.0, 1e-12);

    const auto c = wiener_oracle(FirFilter({0, 0, 1, 0.5}), FirFilter({1, 0.5}), 8);
    EXPECT_LT(c.residual_power, 1e-6);
}

TEST(Wiener, AgreesWithEmpiricalFit) {
    fxtest::Gen gen(81);
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<double> st = gen.vec(gen.index(1, 4));
        st[0] = gen.uniform(0.5, 1.0);
        std::vector<double> pt(3, 0.0);
        const auto tail = gen.vec(gen.index(1, 8));
        pt.insert(pt.end(), tail.begin(), tail.end());
        const FirFilter p(pt), s(st);
        const std::size_t order = 12;
        const auto analytic = wiener_oracle(p, s, order);
        const auto empirical = empirical_wiener(p, s, order);
        for (std::size_t k = 0; k < order; ++k)
            EXPECT_NEAR(analytic.taps.taps()[k], empirical[k], 2e-2) << "trial " << trial;
    }
}

TEST(Wiener, Errors) {
    EXPECT_THROW(wiener_oracle(FirFilter({1.0}), paths::builtin_filter("delay-2"), 4), InfeasibleError);
    try {
        wiener_oracle(FirFilter({1.0}), FirFilter({1, 4, 6, 4, 1}), 200);
        FAIL() << "expected a conditioning error";
    } catch (const ConditioningError& e) {
        EXPECT_GT(e.condition_number(), kMaxConditionNumber);
    }
    EXPECT_THROW(wiener_oracle(FirFilter({1.0}), FirFilter({1.0}), 0), ValidationError);
}
