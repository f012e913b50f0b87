#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fxlab/signals.hpp"

namespace fxlab::paths {

/// Immutable FIR filter: P(z), S(z) and the offline model of S(z).
class FirFilter {
public:
    explicit FirFilter(std::vector<double> taps, std::string label = {});

    std::span<const double> taps() const noexcept { return taps_; }
    const std::string& label() const noexcept { return label_; }
    std::size_t size() const noexcept { return taps_.size(); }

    /// Index of the first nonzero tap; size() for an all-zero filter.
    std::size_t delay() const noexcept;

private:
    std::vector<double> taps_;
    std::string label_;
};

/// Fixed-capacity history of the most recent samples, newest first.
/// Starts zero-filled.
class DelayLine {
public:
    explicit DelayLine(std::size_t capacity);

    void push(double x) noexcept;
    void reset() noexcept;

    /// [newest, ..., oldest], always `capacity()` long.
    std::span<const double> window() const noexcept {
        return {buffer_.data() + head_, capacity_};
    }
    double operator[](std::size_t age) const noexcept { return buffer_[head_ + age]; }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    // Each sample is stored twice so the window is always contiguous.
    std::vector<double> buffer_;
    std::size_t capacity_;
    std::size_t head_ = 0;
};

double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Pushes x_n into `line` and returns taps . window. The line must have
/// exactly as many slots as the filter has taps.
double filter_sample(const FirFilter& f, DelayLine& line, double x_n);

/// Zero-state convolution truncated to the input length.
signals::SignalBuffer filter_buffer(const FirFilter& f, const signals::SignalBuffer& input);

struct IdentificationResult {
    FirFilter model;
    // Mean squared identification error over the final tenth of the run.
    double final_error_power;
};

inline constexpr double kDefaultIdentificationStep = 0.01;

/// Offline LMS identification of `true_s` driven by unit-variance white
/// noise. Throws DivergenceError when the error power exceeds 1e6 times the
/// excitation power.
IdentificationResult identify_secondary_path(const FirFilter& true_s, std::size_t model_order,
                                             std::size_t excitation_length, double step_size,
                                             std::uint64_t seed);

/// One coefficient per line; '#' starts a comment; blank lines ignored.
FirFilter load_fir_file(const std::filesystem::path& path);
void save_fir_file(const FirFilter& f, const std::filesystem::path& path);

/// Built-in plants: "primary-default", "secondary-default", "identity",
/// "delay-<n>".
FirFilter builtin_filter(const std::string& name);
std::vector<std::string> builtin_filter_names();

/// Resolves "builtin:<name>" or a coefficient file path relative to `base_dir`.
FirFilter resolve_filter(const std::string& ref, const std::filesystem::path& base_dir = {});

} // namespace fxlab::paths
