#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fxlab::signals {

inline constexpr double kDefaultSampleRateHz = 8000.0;

struct SignalBuffer {
    std::vector<double> samples;
    double sample_rate_hz = kDefaultSampleRateHz;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    std::span<const double> view() const noexcept { return samples; }

    // Throws ValidationError unless the buffer is non-empty, finite and has a
    // positive sample rate.
    void validate(const std::string& what = "signal") const;
};

enum class SourceKind { Sinusoid, MultiTone, WhiteNoise, SinusoidPlusNoise, File };

std::string to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& name);

struct SourceSpec {
    SourceKind kind = SourceKind::Sinusoid;
    std::vector<double> frequency_hz;
    // One entry per frequency, or a single entry applied to every component.
    std::vector<double> amplitude{1.0};
    double noise_variance = 0.0;
    std::uint64_t seed = 0;
    std::size_t length_samples = 0;
    std::filesystem::path path;

    void validate(double sample_rate_hz) const;
};

SignalBuffer generate(const SourceSpec& spec, double sample_rate_hz);

/// Deterministic zero-mean Gaussian sequence (Box-Muller over mt19937_64).
/// The output depends only on (seed, count, variance), independent of the
/// standard library's distribution implementations.
std::vector<double> gaussian_noise(std::uint64_t seed, std::size_t count, double variance);

double mean(std::span<const double> x);
double power(std::span<const double> x);
double max_abs(std::span<const double> x);

} // namespace fxlab::signals
