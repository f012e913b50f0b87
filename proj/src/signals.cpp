#include "fxlab/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fxlab/error.hpp"
#include "fxlab/wav.hpp"

namespace fxlab::signals {

namespace {

// 53-bit uniform in [0, 1).
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool is_tonal(SourceKind kind) {
    return kind == SourceKind::Sinusoid || kind == SourceKind::MultiTone ||
           kind == SourceKind::SinusoidPlusNoise;
}

bool has_noise(SourceKind kind) {
    return kind == SourceKind::WhiteNoise || kind == SourceKind::SinusoidPlusNoise;
}

} // namespace

void SignalBuffer::validate(const std::string& what) const {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
        throw ValidationError(what + ": sample rate must be positive");
    if (samples.empty())
        throw ValidationError(what + ": buffer is empty");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i]))
            throw ValidationError(what + ": non-finite sample at index " + std::to_string(i));
    }
}

std::string to_string(SourceKind kind) {
    switch (kind) {
    case SourceKind::Sinusoid: return "sinusoid";
    case SourceKind::MultiTone: return "multi-tone";
    case SourceKind::WhiteNoise: return "white-noise";
    case SourceKind::SinusoidPlusNoise: return "sinusoid-plus-noise";
    case SourceKind::File: return "file";
    }
    return "unknown";
}

SourceKind source_kind_from_string(const std::string& name) {
    for (auto kind : {SourceKind::Sinusoid, SourceKind::MultiTone, SourceKind::WhiteNoise,
                      SourceKind::SinusoidPlusNoise, SourceKind::File}) {
        if (to_string(kind) == name)
            return kind;
    }
    throw ValidationError("unknown source kind '" + name +
                          "' (expected sinusoid, multi-tone, white-noise, "
                          "sinusoid-plus-noise or file)");
}

void SourceSpec::validate(double sample_rate_hz) const {
    if (!(sample_rate_hz > 0.0))
        throw ValidationError("sample rate must be positive");
    if (length_samples == 0)
        throw ValidationError("source length must be positive");
    if (is_tonal(kind)) {
        if (frequency_hz.empty())
            throw ValidationError(to_string(kind) + " source needs at least one frequency");
        if (kind == SourceKind::Sinusoid && frequency_hz.size() != 1)
            throw ValidationError("sinusoid source takes exactly one frequency");
        if (amplitude.size() != 1 && amplitude.size() != frequency_hz.size())
            throw ValidationError("amplitude list must have one entry or one per frequency");
        for (double f : frequency_hz) {
            if (!(f > 0.0))
                throw ValidationError("tone frequency must be positive");
            if (f >= sample_rate_hz / 2.0)
                throw ValidationError("tone frequency " + std::to_string(f) +
                                      " Hz is at or above Nyquist (" +
                                      std::to_string(sample_rate_hz / 2.0) + " Hz)");
        }
        for (double a : amplitude) {
            if (!(a > 0.0) || !std::isfinite(a))
                throw ValidationError("tone amplitude must be positive and finite");
        }
    }
    if (has_noise(kind) && (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)))
        throw ValidationError("noise variance must be non-negative");
    if (kind == SourceKind::File && path.empty())
        throw ValidationError("file source needs a path");
}

std::vector<double> gaussian_noise(std::uint64_t seed, std::size_t count, double variance) {
    std::vector<double> out(count, 0.0);
    if (variance == 0.0)
        return out;
    const double sigma = std::sqrt(variance);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; i += 2) {
        const double u1 = 1.0 - unit_uniform(rng); // (0, 1]
        const double u2 = unit_uniform(rng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        out[i] = sigma * r * std::cos(phi);
        if (i + 1 < count)
            out[i + 1] = sigma * r * std::sin(phi);
    }
    return out;
}

SignalBuffer generate(const SourceSpec& spec, double sample_rate_hz) {
    spec.validate(sample_rate_hz);
    SignalBuffer out;
    out.sample_rate_hz = sample_rate_hz;

    if (spec.kind == SourceKind::File) {
        SignalBuffer file = load_wav(spec.path);
        if (file.sample_rate_hz != sample_rate_hz)
            throw ValidationError("source file " + spec.path.string() + " has sample rate " +
                                  std::to_string(file.sample_rate_hz) + " Hz, expected " +
                                  std::to_string(sample_rate_hz) + " Hz");
        if (file.size() < spec.length_samples)
            throw ValidationError("source file " + spec.path.string() + " holds " +
                                  std::to_string(file.size()) + " samples, " +
                                  std::to_string(spec.length_samples) + " requested");
        file.samples.resize(spec.length_samples);
        return file;
    }

    out.samples.assign(spec.length_samples, 0.0);
    if (is_tonal(spec.kind)) {
        for (std::size_t c = 0; c < spec.frequency_hz.size(); ++c) {
            const double amp = spec.amplitude.size() == 1 ? spec.amplitude[0] : spec.amplitude[c];
            const double omega = 2.0 * std::numbers::pi * spec.frequency_hz[c] / sample_rate_hz;
            for (std::size_t k = 0; k < out.samples.size(); ++k)
                out.samples[k] += amp * std::sin(omega * static_cast<double>(k));
        }
    }
    if (has_noise(spec.kind)) {
        const auto noise = gaussian_noise(spec.seed, spec.length_samples, spec.noise_variance);
        for (std::size_t k = 0; k < out.samples.size(); ++k)
            out.samples[k] += noise[k];
    }
    return out;
}

double mean(std::span<const double> x) {
    if (x.empty())
        return 0.0;
    double acc = 0.0;
    for (double v : x)
        acc += v;
    return acc / static_cast<double>(x.size());
}

double power(std::span<const double> x) {
    if (x.empty())
        return 0.0;
    double acc = 0.0;
    for (double v : x)
        acc += v * v;
    return acc / static_cast<double>(x.size());
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace fxlab::signals
