#include <algorithm>
#include <ostream>

#include "cli_common.hpp"
#include "fxlab/cli.hpp"
#include "fxlab/csv.hpp"

namespace fxlab::cli {

namespace {

using nlohmann::json;
using namespace detail;

struct Row {
    std::size_t run = 0;
    std::string controller;
    std::string kind;
    std::string status;
    double final_r_db = 0.0;
    metrics::MetricSeries reduction;
    std::optional<std::size_t> index;
    std::optional<std::size_t> iterations;
};

struct Run {
    std::filesystem::path dir;
    json manifest;
    csv::Table reduction;
};

std::string delta(std::optional<std::size_t> a, std::optional<std::size_t> b) {
    if (!a || !b)
        return "none";
    return std::to_string(static_cast<long long>(*a) - static_cast<long long>(*b));
}

// Shorter time to target first; never-reaching and diverged rows last.
bool ranks_before(const Row& a, const Row& b) {
    if (a.iterations.has_value() != b.iterations.has_value())
        return a.iterations.has_value();
    if (a.iterations && *a.iterations != *b.iterations)
        return *a.iterations < *b.iterations;
    const bool an = std::isnan(a.final_r_db);
    const bool bn = std::isnan(b.final_r_db);
    if (an != bn)
        return !an;
    if (!an && a.final_r_db != b.final_r_db)
        return a.final_r_db > b.final_r_db;
    return std::tie(a.run, a.controller) < std::tie(b.run, b.controller);
}

} // namespace

int compare_command(const std::vector<std::filesystem::path>& run_dirs,
                    const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err) {
    try {
        if (run_dirs.size() < 2)
            throw ValidationError("compare needs at least two run directories");

        std::vector<Run> runs;
        for (const auto& dir : run_dirs)
            runs.push_back({dir, read_manifest(dir), csv::read(dir / kNoiseReductionFile)});

        const std::string hash = runs.front().manifest.at("scenario_hash").get<std::string>();
        for (const auto& r : runs) {
            const auto h = r.manifest.at("scenario_hash").get<std::string>();
            if (h != hash)
                throw ValidationError("scenario hash mismatch: " + runs.front().dir.string() + " has " +
                                      hash + " but " + r.dir.string() + " has " + h +
                                      "; runs differ in plant, source, seed or metric settings");
        }
        const auto& metric_cfg = runs.front().manifest.at("config").at("metrics");
        const double offset = metric_cfg.at("target_offset_db").get<double>();
        const auto window = metric_cfg.at("window").get<std::size_t>();

        std::vector<Row> rows;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto met = csv::read(runs[i].dir / kMetricsFile);
            const auto names = met.column("controller");
            const auto kinds = met.column("kind");
            const auto status = met.column("status");
            const auto finals = met.numbers("final_r_db");
            for (std::size_t k = 0; k < met.rows.size(); ++k) {
                Row row;
                row.run = i;
                row.controller = met.rows[k][names];
                row.kind = met.rows[k][kinds];
                row.status = met.rows[k][status];
                row.final_r_db = finals[k];
                row.reduction = series_from(row.controller, window, runs[i].reduction.numbers(row.controller));
                rows.push_back(std::move(row));
            }
        }

        // Common target across runs, same rule as a single run.
        std::optional<double> reference;
        for (const auto& r : rows)
            if (r.kind == "fxlms" && !std::isnan(r.final_r_db)) {
                reference = r.final_r_db;
                break;
            }
        if (!reference)
            for (const auto& r : rows)
                if (!std::isnan(r.final_r_db))
                    reference = reference ? std::min(*reference, r.final_r_db) : r.final_r_db;
        const double target = reference ? *reference - offset : std::numeric_limits<double>::quiet_NaN();

        for (auto& r : rows) {
            if (reference && r.status == "ok") {
                r.index = metrics::iterations_to_threshold(r.reduction, target);
                if (r.index)
                    r.iterations = metrics::window_end_iteration(r.reduction, *r.index);
            }
        }

        auto baseline = [&](const Row& r) -> const Row* {
            for (const auto& b : rows)
                if (b.run == 0 && b.controller == r.controller)
                    return &b;
            return nullptr;
        };

        std::vector<const Row*> ranked;
        for (const auto& r : rows)
            ranked.push_back(&r);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const Row* a, const Row* b) { return ranks_before(*a, *b); });

        csv::Table table{{"rank", "run", "run_dir", "controller", "kind", "status", "final_r_db", "target_db",
                          "iterations_to_threshold", "delta_final_r_db", "delta_iterations"},
                         {}};
        for (std::size_t k = 0; k < ranked.size(); ++k) {
            const Row& r = *ranked[k];
            const Row* b = baseline(r);
            std::string dr = "none";
            if (b && !std::isnan(r.final_r_db) && !std::isnan(b->final_r_db))
                dr = format_number(r.final_r_db - b->final_r_db);
            table.rows.push_back({std::to_string(k + 1), std::to_string(r.run), runs[r.run].dir.string(),
                                  r.controller, r.kind, r.status, cell(r.final_r_db), cell(target),
                                  cell(r.iterations), dr, b ? delta(r.iterations, b->iterations) : "none"});
        }

        csv::Table overlay{{"window", "end_iteration"}, {}};
        std::size_t windows = std::numeric_limits<std::size_t>::max();
        for (const auto& r : rows) {
            overlay.header.push_back("run" + std::to_string(r.run) + "." + r.controller);
            windows = std::min(windows, r.reduction.size());
        }
        for (std::size_t w = 0; w < windows; ++w) {
            std::vector<std::string> line{std::to_string(w), std::to_string((w + 1) * window)};
            for (const auto& r : rows)
                line.push_back(cell(r.reduction.values[w]));
            overlay.rows.push_back(std::move(line));
        }

        std::filesystem::create_directories(output_dir);
        csv::write(output_dir / "comparison.csv", table);
        csv::write(output_dir / "overlay_noise_reduction.csv", overlay);

        out << "target " << cell(target) << " dB\n";
        for (const auto& line : table.rows)
            out << "  " << line[0] << ". run" << line[1] << " " << line[3] << " (" << line[4]
                << "): final R " << line[6] << " dB, iterations " << line[8] << '\n';
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed manifest: " << e.what() << '\n';
        return kFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

} // namespace fxlab::cli
