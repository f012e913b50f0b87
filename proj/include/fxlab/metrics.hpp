#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fxlab::metrics {

inline constexpr double kCapDb = 120.0;
inline constexpr std::size_t kDefaultWindow = 1000;
inline constexpr std::size_t kDefaultSmoothing = 200;

enum class PointStatus {
    Ok,
    Saturated, // clamped to +/-kCapDb
    Undefined, // ratio not defined (e.g. no reference energy); value is NaN
};

struct MetricSeries {
    std::string name;
    std::size_t window = 1;
    std::vector<double> values;
    std::vector<PointStatus> status;

    std::size_t size() const noexcept { return values.size(); }
    bool defined(std::size_t i) const noexcept { return status[i] != PointStatus::Undefined; }
};

struct NoiseReduction {
    // One point per complete, non-overlapping window; point i covers samples
    // [i * window, (i + 1) * window).
    MetricSeries per_window;
    double whole_run_db = 0.0;
    PointStatus whole_run_status = PointStatus::Ok;
};

/// -10 log10(sum e^2 / sum d^2), clamped to [-kCapDb, kCapDb].
double reduction_db(double error_energy, double reference_energy, PointStatus* status);

NoiseReduction noise_reduction_db(std::span<const double> e, std::span<const double> d,
                                  std::size_t window);

/// 20 log10 of the RMS of e over a trailing window of `smoothing` samples
/// (fewer at the start), floored at -kCapDb.
MetricSeries convergence_curve(std::span<const double> e, std::size_t smoothing);

/// First index from which the series stays at or above `target` for `hold`
/// consecutive defined points (default: through the end of the series).
std::optional<std::size_t> iterations_to_threshold(const MetricSeries& series, double target,
                                                   std::optional<std::size_t> hold = std::nullopt);

/// Sample count at which a per-window series point ends.
inline std::size_t window_end_iteration(const MetricSeries& series, std::size_t index) {
    return (index + 1) * series.window;
}

/// Mean of the last `count` defined values (count clipped to the series).
double tail_mean(const MetricSeries& series, std::size_t count);

} // namespace fxlab::metrics
