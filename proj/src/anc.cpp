#include "fxlab/anc.hpp"

#include <algorithm>
#include <cmath>

#include "fxlab/error.hpp"
#include "fxlab/format.hpp"

namespace fxlab::anc {

std::string to_string(ControllerKind kind) {
    switch (kind) {
    case ControllerKind::LmsDirect: return "lms-direct";
    case ControllerKind::Fxlms: return "fxlms";
    case ControllerKind::FxlmsFixedThreshold: return "fxlms-fixed-threshold";
    case ControllerKind::FxlmsVariable: return "fxlms-variable";
    }
    return "unknown";
}

ControllerKind controller_kind_from_string(const std::string& name) {
    for (auto kind : {ControllerKind::LmsDirect, ControllerKind::Fxlms,
                      ControllerKind::FxlmsFixedThreshold, ControllerKind::FxlmsVariable}) {
        if (to_string(kind) == name)
            return kind;
    }
    throw ValidationError("unknown controller kind '" + name +
                          "' (expected lms-direct, fxlms, fxlms-fixed-threshold or "
                          "fxlms-variable)");
}

FeatureFlags default_features(ControllerKind kind) {
    switch (kind) {
    case ControllerKind::LmsDirect:
    case ControllerKind::Fxlms: return {};
    case ControllerKind::FxlmsFixedThreshold: return {true, false, false};
    case ControllerKind::FxlmsVariable: return {true, true, true};
    }
    return {};
}

std::string to_string(ThresholdDomain domain) {
    return domain == ThresholdDomain::Wavelet ? "wavelet" : "sample";
}

ThresholdDomain threshold_domain_from_string(const std::string& name) {
    if (name == "wavelet")
        return ThresholdDomain::Wavelet;
    if (name == "sample")
        return ThresholdDomain::Sample;
    throw ValidationError("unknown threshold domain '" + name + "' (expected wavelet or sample)");
}

ControllerConfig ControllerConfig::for_kind(ControllerKind kind) {
    ControllerConfig c;
    c.kind = kind;
    c.features = default_features(kind);
    return c;
}

void ControllerConfig::validate() const {
    if (taps == 0)
        throw ValidationError("controller needs at least one tap");
    if (!(mu_base >= 0.0) || !std::isfinite(mu_base))
        throw ValidationError("mu_base must be non-negative and finite");
    if (!(mu_max > 0.0) || !std::isfinite(mu_max))
        throw ValidationError("mu_max must be positive and finite");
    if (!(error_clamp >= 0.0 && error_clamp < 1.0))
        throw ValidationError("error_clamp must lie in [0, 1)");
    if (features.use_wavelet_threshold) {
        resolved_policy().validate();
        if (domain == ThresholdDomain::Wavelet)
            wavelet.validate();
    }
}

wavelet::ThresholdPolicy ControllerConfig::resolved_policy() const {
    wavelet::ThresholdPolicy p = threshold;
    p.adaptation = features.variable_threshold ? wavelet::Adaptation::Variable
                                               : wavelet::Adaptation::Fixed;
    return p;
}

double mu_effective(double mu_base, double e_n, double clamp, double mu_max) noexcept {
    double mag = std::abs(e_n);
    if (!(mag <= clamp))
        mag = clamp;
    return std::min(mu_base / (1.0 - mag), mu_max);
}

ControllerState::ControllerState(const ControllerConfig& config, const paths::FirFilter& plant_s,
                                 const paths::FirFilter& model_s_hat)
    : w(config.taps, 0.0),
      mu_base(config.mu_base),
      mu_current(config.mu_base),
      x_line(config.taps),
      x_model_line(model_s_hat.size()),
      xprime_line(config.taps),
      y_line(plant_s.size()) {
    if (config.features.use_wavelet_threshold && config.domain == ThresholdDomain::Wavelet)
        denoiser.emplace(config.wavelet, config.threshold.kind, config.output_tap);
}

StepRecord fxlms_step(ControllerState& state, const ControllerConfig& config, double x_n,
                      double d_n, const paths::FirFilter& plant_s,
                      const paths::FirFilter& model_s_hat, double v_n) {
    StepRecord rec;

    state.x_line.push(x_n);
    rec.y = paths::dot(state.w, state.x_line.window());

    double y_prime = paths::filter_sample(plant_s, state.y_line, rec.y) + v_n;
    if (config.features.use_wavelet_threshold) {
        const auto policy = config.resolved_policy();
        rec.lambda_eff = wavelet::effective_lambda(policy, state.previous_error);
        if (config.domain == ThresholdDomain::Wavelet)
            y_prime = state.denoiser->process(y_prime, rec.lambda_eff);
        else
            y_prime = wavelet::apply_threshold(policy.kind, y_prime, rec.lambda_eff);
    }
    rec.y_prime = y_prime;
    rec.e = d_n - y_prime;

    const double x_filtered = config.kind == ControllerKind::LmsDirect
                                  ? x_n
                                  : paths::filter_sample(model_s_hat, state.x_model_line, x_n);
    state.xprime_line.push(x_filtered);

    state.mu_current = config.features.variable_step
                           ? mu_effective(state.mu_base, state.previous_error, config.error_clamp,
                                          config.mu_max)
                           : state.mu_base;
    rec.mu_eff = state.mu_current;

    if (!std::isfinite(rec.e) || std::abs(rec.e) > state.divergence_bound)
        throw DivergenceError("controller diverged at iteration " +
                                  std::to_string(state.iteration) + " (e = " +
                                  format_number(rec.e) + ")",
                              state.iteration);

    const double gain = state.mu_current * rec.e;
    const auto xp = state.xprime_line.window();
    for (std::size_t k = 0; k < state.w.size(); ++k) {
        state.w[k] += gain * xp[k];
        if (!std::isfinite(state.w[k]))
            throw DivergenceError("controller tap " + std::to_string(k) +
                                      " became non-finite at iteration " +
                                      std::to_string(state.iteration),
                                  state.iteration);
    }

    state.previous_error = rec.e;
    ++state.iteration;
    return rec;
}

SimulationInputs make_inputs(signals::SignalBuffer x, const paths::FirFilter& primary,
                             paths::FirFilter plant_s, paths::FirFilter model_s_hat,
                             std::vector<double> secondary_noise) {
    x.validate("reference signal");
    auto d = paths::filter_buffer(primary, x);
    return {std::move(x), std::move(d), std::move(plant_s), std::move(model_s_hat),
            std::move(secondary_noise)};
}

RunTrace run_simulation(const SimulationInputs& inputs, const ControllerConfig& config,
                        std::string label) {
    config.validate();
    inputs.x.validate("reference signal");
    inputs.d.validate("primary noise");
    if (inputs.x.size() != inputs.d.size())
        throw ValidationError("reference and primary noise lengths differ");
    if (!inputs.secondary_noise.empty() && inputs.secondary_noise.size() != inputs.x.size())
        throw ValidationError("secondary-path noise length differs from the reference");

    RunTrace trace;
    trace.label = label.empty() ? to_string(config.kind) : std::move(label);
    const std::size_t n = inputs.x.size();
    trace.e.reserve(n);
    trace.y.reserve(n);
    trace.y_prime.reserve(n);
    trace.lambda_eff.reserve(n);
    trace.mu_eff.reserve(n);

    ControllerState state(config, inputs.plant_s, inputs.model_s_hat);
    const double d_peak = signals::max_abs(inputs.d.view());
    state.divergence_bound = d_peak > 0.0 ? kDivergenceFactor * d_peak
                                          : std::numeric_limits<double>::infinity();

    try {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = inputs.secondary_noise.empty() ? 0.0 : inputs.secondary_noise[i];
            const auto rec = fxlms_step(state, config, inputs.x.samples[i], inputs.d.samples[i],
                                        inputs.plant_s, inputs.model_s_hat, v);
            trace.e.push_back(rec.e);
            trace.y.push_back(rec.y);
            trace.y_prime.push_back(rec.y_prime);
            trace.lambda_eff.push_back(rec.lambda_eff);
            trace.mu_eff.push_back(rec.mu_eff);
        }
    } catch (const DivergenceError& err) {
        trace.divergence = Divergence{err.iteration(), err.what()};
    }
    trace.final_taps = state.w;
    return trace;
}

} // namespace fxlab::anc
