#include "fxlab/wavelet.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "fxlab/error.hpp"

namespace fxlab::wavelet {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

const std::array<double, 2> kHaar{kInvSqrt2, kInvSqrt2};

// (1+sqrt3, 3+sqrt3, 3-sqrt3, 1-sqrt3) / (4 sqrt2)
const std::array<double, 4> kDb2{
    0.48296291314453414337, 0.83651630373780790558,
    0.22414386804201338103, -0.12940952255126038117};

const std::array<double, 8> kDb4{
    0.23037781330889650086,  0.71484657055291564709,  0.63088076792985890788,
    -0.02798376941685985422, -0.18703481171909308408, 0.03084138183556076363,
    0.03288301166688519974,  -0.01059740178506903211};

void analysis_step(std::span<const double> in, std::span<double> approx, std::span<double> detail,
                   std::span<const double> h) {
    const std::size_t n = in.size();
    const std::size_t taps = h.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t k = 0; k < taps; ++k) {
            const double x = in[(2 * i + k) % n];
            // g[k] = (-1)^k h[taps-1-k]
            const double g = (k % 2 == 0 ? 1.0 : -1.0) * h[taps - 1 - k];
            a += h[k] * x;
            d += g * x;
        }
        approx[i] = a;
        detail[i] = d;
    }
}

void synthesis_step(std::span<const double> approx, std::span<const double> detail,
                    std::span<double> out, std::span<const double> h) {
    const std::size_t n = out.size();
    const std::size_t taps = h.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n / 2; ++i) {
        for (std::size_t k = 0; k < taps; ++k) {
            const double g = (k % 2 == 0 ? 1.0 : -1.0) * h[taps - 1 - k];
            out[(2 * i + k) % n] += h[k] * approx[i] + g * detail[i];
        }
    }
}

} // namespace

std::string to_string(Family family) {
    switch (family) {
    case Family::Haar: return "haar";
    case Family::Db2: return "db2";
    case Family::Db4: return "db4";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    if (name == "haar")
        return Family::Haar;
    if (name == "db2")
        return Family::Db2;
    if (name == "db4")
        return Family::Db4;
    throw ValidationError("unknown wavelet family '" + name + "' (expected haar, db2 or db4)");
}

std::span<const double> scaling_filter(Family family) {
    switch (family) {
    case Family::Haar: return kHaar;
    case Family::Db2: return kDb2;
    case Family::Db4: return kDb4;
    }
    return kHaar;
}

void WaveletSpec::validate() const {
    if (block_length < 2 || !std::has_single_bit(block_length))
        throw ValidationError("wavelet block length " + std::to_string(block_length) +
                              " is not a power of two >= 2");
    const auto max_levels = static_cast<std::size_t>(std::countr_zero(block_length));
    if (levels == 0 || levels > max_levels)
        throw ValidationError("wavelet levels " + std::to_string(levels) + " outside [1, " +
                              std::to_string(max_levels) + "] for block length " +
                              std::to_string(block_length));
}

std::size_t CoefficientSet::size() const noexcept {
    std::size_t n = approximation.size();
    for (const auto& d : details)
        n += d.size();
    return n;
}

CoefficientSet dwt(std::span<const double> block, const WaveletSpec& spec) {
    spec.validate();
    if (block.size() != spec.block_length)
        throw ValidationError("dwt: block has " + std::to_string(block.size()) +
                              " samples, expected " + std::to_string(spec.block_length));
    const auto h = scaling_filter(spec.family);
    CoefficientSet out;
    std::vector<double> current(block.begin(), block.end());
    for (std::size_t level = 0; level < spec.levels; ++level) {
        const std::size_t half = current.size() / 2;
        std::vector<double> approx(half);
        std::vector<double> detail(half);
        analysis_step(current, approx, detail, h);
        out.details.push_back(std::move(detail));
        current = std::move(approx);
    }
    out.approximation = std::move(current);
    return out;
}

std::vector<double> idwt(const CoefficientSet& coeffs, const WaveletSpec& spec) {
    spec.validate();
    if (coeffs.details.size() != spec.levels)
        throw ValidationError("idwt: " + std::to_string(coeffs.details.size()) +
                              " detail levels, expected " + std::to_string(spec.levels));
    std::size_t expected = spec.block_length >> spec.levels;
    if (coeffs.approximation.size() != expected)
        throw ValidationError("idwt: approximation has " +
                              std::to_string(coeffs.approximation.size()) +
                              " coefficients, expected " + std::to_string(expected));
    for (std::size_t level = spec.levels; level-- > 0;) {
        expected = spec.block_length >> (level + 1);
        if (coeffs.details[level].size() != expected)
            throw ValidationError("idwt: detail level " + std::to_string(level + 1) + " has " +
                                  std::to_string(coeffs.details[level].size()) +
                                  " coefficients, expected " + std::to_string(expected));
    }

    const auto h = scaling_filter(spec.family);
    std::vector<double> current = coeffs.approximation;
    for (std::size_t level = spec.levels; level-- > 0;) {
        std::vector<double> next(current.size() * 2);
        synthesis_step(current, coeffs.details[level], next, h);
        current = std::move(next);
    }
    return current;
}

std::string to_string(ThresholdKind kind) {
    return kind == ThresholdKind::Hard ? "hard" : "soft";
}

std::string to_string(Adaptation adaptation) {
    return adaptation == Adaptation::Fixed ? "fixed" : "variable";
}

ThresholdKind threshold_kind_from_string(const std::string& name) {
    if (name == "hard")
        return ThresholdKind::Hard;
    if (name == "soft")
        return ThresholdKind::Soft;
    throw ValidationError("unknown threshold kind '" + name + "' (expected hard or soft)");
}

Adaptation adaptation_from_string(const std::string& name) {
    if (name == "fixed")
        return Adaptation::Fixed;
    if (name == "variable")
        return Adaptation::Variable;
    throw ValidationError("unknown threshold adaptation '" + name +
                          "' (expected fixed or variable)");
}

ThresholdPolicy ThresholdPolicy::make(ThresholdKind kind, double base_lambda,
                                      Adaptation adaptation) {
    ThresholdPolicy p;
    p.kind = kind;
    p.base_lambda = base_lambda;
    p.adaptation = adaptation;
    p.lambda_max = kDefaultLambdaMaxFactor * base_lambda;
    return p;
}

void ThresholdPolicy::validate() const {
    if (!(base_lambda >= 0.0) || !std::isfinite(base_lambda))
        throw ValidationError("threshold lambda must be non-negative");
    if (!(error_clamp >= 0.0 && error_clamp < 1.0))
        throw ValidationError("threshold error clamp must lie in [0, 1)");
    if (!(lambda_max >= base_lambda) || !std::isfinite(lambda_max))
        throw ValidationError("lambda_max must be finite and at least the base lambda");
}

double threshold_hard(double y, double lambda) noexcept {
    return std::abs(y) <= lambda ? 0.0 : y;
}

double threshold_soft(double y, double lambda) noexcept {
    const double mag = std::abs(y);
    if (mag <= lambda)
        return 0.0;
    return std::copysign(mag - lambda, y);
}

double apply_threshold(ThresholdKind kind, double y, double lambda) noexcept {
    return kind == ThresholdKind::Hard ? threshold_hard(y, lambda) : threshold_soft(y, lambda);
}

double effective_lambda(const ThresholdPolicy& policy, double e_n) noexcept {
    if (policy.adaptation == Adaptation::Fixed)
        return policy.base_lambda;
    double mag = std::abs(e_n);
    if (!(mag <= policy.error_clamp)) // also catches NaN
        mag = policy.error_clamp;
    return std::min(policy.base_lambda / (1.0 - mag), policy.lambda_max);
}

std::vector<double> denoise_block_at(std::span<const double> block, const WaveletSpec& spec,
                                     ThresholdKind kind, double lambda) {
    auto coeffs = dwt(block, spec);
    for (auto& level : coeffs.details) {
        for (double& c : level)
            c = apply_threshold(kind, c, lambda);
    }
    return idwt(coeffs, spec);
}

std::vector<double> denoise_block(std::span<const double> block, const WaveletSpec& spec,
                                  const ThresholdPolicy& policy, double e_n) {
    return denoise_block_at(block, spec, policy.kind, effective_lambda(policy, e_n));
}

std::string to_string(OutputTap tap) {
    return tap == OutputTap::Center ? "center" : "newest";
}

OutputTap output_tap_from_string(const std::string& name) {
    if (name == "center")
        return OutputTap::Center;
    if (name == "newest")
        return OutputTap::Newest;
    throw ValidationError("unknown output tap '" + name + "' (expected center or newest)");
}

SlidingDenoiser::SlidingDenoiser(WaveletSpec spec, ThresholdKind kind, OutputTap tap)
    : spec_(spec), kind_(kind), tap_(tap) {
    spec_.validate();
    history_.assign(spec_.block_length, 0.0);
}

void SlidingDenoiser::reset() {
    std::fill(history_.begin(), history_.end(), 0.0);
}

std::size_t SlidingDenoiser::output_age() const noexcept {
    return tap_ == OutputTap::Newest ? 0 : spec_.block_length / 2 - 1;
}

double SlidingDenoiser::process(double sample, double lambda) {
    std::shift_left(history_.begin(), history_.end(), 1);
    history_.back() = sample;
    scratch_ = denoise_block_at(history_, spec_, kind_, lambda);
    return scratch_[spec_.block_length - 1 - output_age()];
}

} // namespace fxlab::wavelet
