#include <algorithm>
#include <ostream>

#include "cli_common.hpp"
#include "fxlab/cli.hpp"
#include "fxlab/csv.hpp"
#include "fxlab/svg.hpp"

namespace fxlab::cli {

namespace {

using namespace detail;

csv::Table require_table(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw IoError("missing series file: " + path.string());
    return csv::read(path);
}

// Every column after the leading index columns is one series.
std::vector<svg::Series> columns_as_series(const csv::Table& t, const std::string& x_column,
                                           std::size_t first_series_column) {
    const auto x = t.numbers(x_column);
    std::vector<svg::Series> out;
    for (std::size_t c = first_series_column; c < t.header.size(); ++c)
        out.push_back({t.header[c], x, t.numbers(t.header[c])});
    return out;
}

std::vector<std::string> controller_names(const std::filesystem::path& run_dir) {
    const auto manifest = read_manifest(run_dir);
    std::vector<std::string> names;
    for (const auto& c : manifest.at("controllers"))
        names.push_back(c.at("name").get<std::string>());
    return names;
}

svg::LineChart build(const std::filesystem::path& dir, const std::string& which) {
    svg::LineChart chart;
    if (which == "noise-reduction") {
        const auto t = require_table(dir / kNoiseReductionFile);
        chart.title = "Noise reduction per window";
        chart.x_label = "iteration";
        chart.y_label = "R (dB)";
        chart.series = columns_as_series(t, "end_iteration", 2);
        chart.range = svg::RangePolicy::DecibelMargin;
    } else if (which == "convergence") {
        const auto t = require_table(dir / kConvergenceFile);
        chart.title = "Convergence (trailing RMS error)";
        chart.x_label = "iteration";
        chart.y_label = "error (dB)";
        chart.series = columns_as_series(t, "iteration", 1);
        chart.range = svg::RangePolicy::DecibelMargin;
    } else if (which == "residual") {
        if (!std::filesystem::exists(dir / kManifestFile))
            throw IoError("missing manifest: " + (dir / kManifestFile).string());
        chart.title = "Residual error";
        chart.x_label = "iteration";
        chart.y_label = "e(n)";
        for (const auto& name : controller_names(dir)) {
            const auto t = require_table(dir / trace_file(name));
            chart.series.push_back({name, t.numbers("iteration"), t.numbers("e")});
        }
    } else if (which == "signal") {
        const auto t = require_table(dir / kSignalsFile);
        chart.title = "Reference and disturbance";
        chart.x_label = "iteration";
        chart.y_label = "amplitude";
        chart.series = columns_as_series(t, "iteration", 1);
    } else {
        std::string list;
        for (const auto& n : plot_names())
            list += (list.empty() ? "" : ", ") + n;
        throw ValidationError("unknown figure '" + which + "'; available: " + list);
    }
    if (chart.series.empty())
        throw ValidationError("no series to plot in " + dir.string());
    return chart;
}

} // namespace

std::vector<std::string> plot_names() {
    return {"noise-reduction", "convergence", "residual", "signal"};
}

int plot_command(const std::filesystem::path& run_dir, const std::string& which,
                 const std::optional<std::filesystem::path>& output, std::ostream& out,
                 std::ostream& err) {
    try {
        const auto chart = build(run_dir, which);
        const auto path = output ? *output : run_dir / ("plot_" + which + ".svg");
        write_text(path, svg::render(chart));
        out << "wrote " << path.string() << '\n';
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed manifest: " << e.what() << '\n';
        return kFailure;
    }
}

} // namespace fxlab::cli
