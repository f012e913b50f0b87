#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "fxlab/error.hpp"
#include "fxlab/format.hpp"
#include "fxlab/metrics.hpp"

namespace fxlab::cli::detail {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSignalsFile = "signals.csv";
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kNoiseReductionFile = "noise_reduction.csv";
inline constexpr const char* kConvergenceFile = "convergence.csv";

inline std::string trace_file(const std::string& controller) {
    return "trace_" + controller + ".csv";
}

inline std::string cell(double v) {
    return std::isnan(v) ? "undefined" : format_number(v);
}

inline std::string cell(std::optional<std::size_t> v) {
    return v ? std::to_string(*v) : "none";
}

inline nlohmann::json read_manifest(const std::filesystem::path& run_dir) {
    const auto path = run_dir / kManifestFile;
    std::ifstream in(path);
    if (!in)
        throw IoError("missing manifest: " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw IoError("failed writing " + path.string());
}

/// Per-window series rebuilt from CSV numbers; NaN marks undefined points.
inline metrics::MetricSeries series_from(std::string name, std::size_t window,
                                         const std::vector<double>& values) {
    metrics::MetricSeries s;
    s.name = std::move(name);
    s.window = window;
    s.values = values;
    for (double v : values)
        s.status.push_back(std::isnan(v) ? metrics::PointStatus::Undefined : metrics::PointStatus::Ok);
    return s;
}

} // namespace fxlab::cli::detail
