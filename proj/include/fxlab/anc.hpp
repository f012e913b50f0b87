#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fxlab/paths.hpp"
#include "fxlab/signals.hpp"
#include "fxlab/wavelet.hpp"

namespace fxlab::anc {

enum class ControllerKind { LmsDirect, Fxlms, FxlmsFixedThreshold, FxlmsVariable };

std::string to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(const std::string& name);

struct FeatureFlags {
    bool use_wavelet_threshold = false;
    bool variable_threshold = false;
    bool variable_step = false;

    friend bool operator==(const FeatureFlags&, const FeatureFlags&) = default;
};

/// Flags implied by a controller kind; fxlms-variable turns everything on.
FeatureFlags default_features(ControllerKind kind);

/// Where the threshold acts on y'(n): in the wavelet domain over a sliding
/// block, or directly on the scalar sample.
enum class ThresholdDomain { Wavelet, Sample };

std::string to_string(ThresholdDomain domain);
ThresholdDomain threshold_domain_from_string(const std::string& name);

inline constexpr std::size_t kDefaultTaps = 32;
inline constexpr double kDefaultMu = 0.01;
inline constexpr double kDefaultMuMax = 0.2;

struct ControllerConfig {
    ControllerKind kind = ControllerKind::Fxlms;
    FeatureFlags features{};
    std::size_t taps = kDefaultTaps;
    double mu_base = kDefaultMu;
    double mu_max = kDefaultMuMax;
    double error_clamp = wavelet::kDefaultErrorClamp;
    // `threshold.adaptation` is driven by features.variable_threshold.
    wavelet::ThresholdPolicy threshold{};
    wavelet::WaveletSpec wavelet{};
    ThresholdDomain domain = ThresholdDomain::Wavelet;
    wavelet::OutputTap output_tap = wavelet::OutputTap::Newest;

    static ControllerConfig for_kind(ControllerKind kind);
    void validate() const;
    wavelet::ThresholdPolicy resolved_policy() const;
};

/// mu_base / (1 - min(|e_n|, clamp)), capped at mu_max.
double mu_effective(double mu_base, double e_n, double clamp, double mu_max) noexcept;

/// Everything that evolves while the loop runs.
struct ControllerState {
    std::vector<double> w;
    double mu_base = 0.0;
    double mu_current = 0.0;
    paths::DelayLine x_line;      // x(n) .. x(n-L+1), controller input
    paths::DelayLine x_model_line; // x history for the S-hat filter
    paths::DelayLine xprime_line; // x'(n) .. x'(n-L+1)
    paths::DelayLine y_line;      // y(n) history feeding S(z)
    std::optional<wavelet::SlidingDenoiser> denoiser;
    double previous_error = 0.0;
    std::size_t iteration = 0;
    // |e| beyond this counts as divergence.
    double divergence_bound = std::numeric_limits<double>::infinity();

    ControllerState(const ControllerConfig& config, const paths::FirFilter& plant_s,
                    const paths::FirFilter& model_s_hat);
};

struct StepRecord {
    double e = 0.0;
    double y = 0.0;
    double y_prime = 0.0; // after the threshold stage
    double lambda_eff = 0.0;
    double mu_eff = 0.0;
};

/// One sample of the closed loop:
///   y = w.x, y' = S{y}, optional threshold on y' (lambda from e(n-1)),
///   e = d - y', x' = S-hat{x}, w += mu e x' (mu from e(n-1) when variable).
/// `v_n` is additive noise on the secondary-path output, entering before the
/// threshold stage. Throws DivergenceError on non-finite or runaway values.
StepRecord fxlms_step(ControllerState& state, const ControllerConfig& config, double x_n,
                      double d_n, const paths::FirFilter& plant_s,
                      const paths::FirFilter& model_s_hat, double v_n = 0.0);

struct SimulationInputs {
    signals::SignalBuffer x; // reference
    signals::SignalBuffer d; // primary noise at the error sensor
    paths::FirFilter plant_s;
    paths::FirFilter model_s_hat;
    // Noise on the secondary-path output y'(n); empty means none.
    std::vector<double> secondary_noise;
};

/// Builds d = P{x} and bundles the plant.
SimulationInputs make_inputs(signals::SignalBuffer x, const paths::FirFilter& primary,
                             paths::FirFilter plant_s, paths::FirFilter model_s_hat,
                             std::vector<double> secondary_noise = {});

struct Divergence {
    std::size_t iteration;
    std::string message;
};

struct RunTrace {
    std::string label;
    std::vector<double> e;
    std::vector<double> y;
    std::vector<double> y_prime;
    std::vector<double> lambda_eff;
    std::vector<double> mu_eff;
    std::vector<double> final_taps;
    // Set when the run stopped early; series then hold the samples before it.
    std::optional<Divergence> divergence;

    std::size_t size() const noexcept { return e.size(); }
    bool ok() const noexcept { return !divergence.has_value(); }
};

inline constexpr double kDivergenceFactor = 1e6;

RunTrace run_simulation(const SimulationInputs& inputs, const ControllerConfig& config,
                        std::string label = {});

struct WienerSolution {
    paths::FirFilter taps;
    double residual_power;   // E[e^2] for unit-variance white input
    double condition_number; // of the normal-equation matrix
};

inline constexpr double kMaxConditionNumber = 1e12;

/// Least-squares FIR approximation of P(z)/S(z) with `order` taps for white
/// unit-variance input. Throws InfeasibleError when P is shorter in delay than
/// S and ConditioningError when the normal equations are ill-conditioned.
WienerSolution wiener_oracle(const paths::FirFilter& p, const paths::FirFilter& s,
                             std::size_t order);

} // namespace fxlab::anc
