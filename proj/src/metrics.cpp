#include "fxlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fxlab/error.hpp"

namespace fxlab::metrics {

double reduction_db(double error_energy, double reference_energy, PointStatus* status) {
    PointStatus st = PointStatus::Ok;
    double value;
    if (!(reference_energy > 0.0)) {
        st = PointStatus::Undefined;
        value = std::numeric_limits<double>::quiet_NaN();
    } else if (error_energy <= 0.0) {
        st = PointStatus::Saturated;
        value = kCapDb;
    } else {
        value = -10.0 * std::log10(error_energy / reference_energy);
        if (value > kCapDb || value < -kCapDb) {
            st = PointStatus::Saturated;
            value = std::clamp(value, -kCapDb, kCapDb);
        }
    }
    if (status != nullptr)
        *status = st;
    return value;
}

NoiseReduction noise_reduction_db(std::span<const double> e, std::span<const double> d,
                                  std::size_t window) {
    if (e.size() != d.size())
        throw ValidationError("noise_reduction_db: error and reference lengths differ");
    if (window == 0 || window > e.size())
        throw ValidationError("noise_reduction_db: window must lie in [1, " +
                              std::to_string(e.size()) + "]");

    NoiseReduction out;
    out.per_window.name = "noise_reduction_db";
    out.per_window.window = window;
    double total_e = 0.0;
    double total_d = 0.0;
    for (std::size_t start = 0; start + window <= e.size(); start += window) {
        double se = 0.0;
        double sd = 0.0;
        for (std::size_t i = start; i < start + window; ++i) {
            se += e[i] * e[i];
            sd += d[i] * d[i];
        }
        PointStatus st;
        out.per_window.values.push_back(reduction_db(se, sd, &st));
        out.per_window.status.push_back(st);
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
        total_e += e[i] * e[i];
        total_d += d[i] * d[i];
    }
    out.whole_run_db = reduction_db(total_e, total_d, &out.whole_run_status);
    return out;
}

MetricSeries convergence_curve(std::span<const double> e, std::size_t smoothing) {
    if (smoothing == 0)
        throw ValidationError("convergence_curve: smoothing must be at least 1");
    MetricSeries out;
    out.name = "convergence_db";
    out.window = smoothing;
    out.values.reserve(e.size());
    out.status.reserve(e.size());
    // Summed directly per point: a running sum loses the tail of fast decays.
    // Samples are scaled by the window peak first, so a constant window gives
    // its RMS exactly.
    for (std::size_t n = 0; n < e.size(); ++n) {
        const std::size_t begin = n + 1 >= smoothing ? n + 1 - smoothing : 0;
        double peak = 0.0;
        for (std::size_t i = begin; i <= n; ++i)
            peak = std::max(peak, std::abs(e[i]));
        double acc = 0.0;
        if (peak > 0.0) {
            for (std::size_t i = begin; i <= n; ++i) {
                const double r = e[i] / peak;
                acc += r * r;
            }
        }
        const double ms = acc / static_cast<double>(n + 1 - begin);
        const double rms = peak * std::sqrt(ms);
        double db = rms > 0.0 ? 20.0 * std::log10(rms) : -kCapDb;
        PointStatus st = PointStatus::Ok;
        if (db < -kCapDb) {
            db = -kCapDb;
            st = PointStatus::Saturated;
        } else if (rms <= 0.0) {
            st = PointStatus::Saturated;
        }
        out.values.push_back(db);
        out.status.push_back(st);
    }
    return out;
}

std::optional<std::size_t> iterations_to_threshold(const MetricSeries& series, double target,
                                                   std::optional<std::size_t> hold) {
    const std::size_t n = series.size();
    std::size_t run_start = 0;
    std::size_t run_length = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (series.defined(i) && series.values[i] >= target) {
            if (run_length == 0)
                run_start = i;
            ++run_length;
            if (hold && run_length >= *hold)
                return run_start;
        } else {
            run_length = 0;
        }
    }
    if (!hold && run_length > 0)
        return run_start;
    return std::nullopt;
}

double tail_mean(const MetricSeries& series, std::size_t count) {
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t i = series.size(); i-- > 0 && used < count;) {
        if (!series.defined(i))
            continue;
        acc += series.values[i];
        ++used;
    }
    return used == 0 ? std::numeric_limits<double>::quiet_NaN() : acc / static_cast<double>(used);
}

} // namespace fxlab::metrics
