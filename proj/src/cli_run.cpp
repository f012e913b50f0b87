#include <future>
#include <ostream>

#include "cli_common.hpp"
#include "fxlab/anc.hpp"
#include "fxlab/cli.hpp"
#include "fxlab/csv.hpp"
#include "fxlab/metrics.hpp"
#include "fxlab/paths.hpp"
#include "fxlab/scenario.hpp"

namespace fxlab::cli {

namespace {

using nlohmann::json;
using namespace detail;

struct ControllerReport {
    const scenario::ControllerEntry* entry;
    anc::RunTrace trace;
    std::optional<metrics::NoiseReduction> reduction;
    metrics::MetricSeries convergence;
    double final_r_db = std::numeric_limits<double>::quiet_NaN();
    std::optional<std::size_t> threshold_index;
};

double final_reduction(const anc::RunTrace& trace, const std::vector<double>& d, std::size_t span) {
    if (!trace.ok() || trace.size() < span)
        return std::numeric_limits<double>::quiet_NaN();
    double se = 0.0;
    double sd = 0.0;
    for (std::size_t i = trace.size() - span; i < trace.size(); ++i) {
        se += trace.e[i] * trace.e[i];
        sd += d[i] * d[i];
    }
    return metrics::reduction_db(se, sd, nullptr);
}

std::vector<double> taps_of(const paths::FirFilter& f) {
    return {f.taps().begin(), f.taps().end()};
}

} // namespace

int run_command(const RunOptions& options, std::ostream& out, std::ostream& err) {
    scenario::ScenarioConfig cfg;
    try {
        json doc = scenario::load_config_document(options.config_path);
        for (const auto& o : options.overrides)
            scenario::apply_override(doc, o);
        if (options.seed)
            doc["seed"] = *options.seed;
        if (options.output_dir)
            doc["output_dir"] = options.output_dir->string();
        cfg = scenario::parse_scenario(doc, options.config_path.parent_path());
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }

    try {
        const auto prepared = scenario::prepare(cfg);
        const auto& inputs = prepared.inputs;
        const auto& d = inputs.d.samples;

        std::vector<std::future<anc::RunTrace>> jobs;
        for (const auto& c : cfg.controllers)
            jobs.push_back(std::async(std::launch::async, [&inputs, &c] {
                return anc::run_simulation(inputs, c.config, c.name);
            }));

        std::vector<ControllerReport> reports;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            ControllerReport r{&cfg.controllers[i], jobs[i].get(), std::nullopt, {}, {}, std::nullopt};
            if (r.trace.size() >= cfg.metrics.window) {
                const std::span<const double> dspan(d.data(), r.trace.size());
                r.reduction = metrics::noise_reduction_db(r.trace.e, dspan, cfg.metrics.window);
            }
            r.convergence = metrics::convergence_curve(r.trace.e, cfg.metrics.smoothing);
            r.final_r_db = final_reduction(r.trace, d, cfg.metrics.final_span);
            reports.push_back(std::move(r));
        }

        // Target: final R of the classic FxLMS controller (or the weakest
        // completed controller when none is listed) minus the offset.
        std::optional<double> reference;
        for (const auto& r : reports) {
            if (r.entry->config.kind == anc::ControllerKind::Fxlms && !std::isnan(r.final_r_db)) {
                reference = r.final_r_db;
                break;
            }
        }
        if (!reference) {
            for (const auto& r : reports) {
                if (!std::isnan(r.final_r_db))
                    reference = reference ? std::min(*reference, r.final_r_db) : r.final_r_db;
            }
        }
        const double target = reference ? *reference - cfg.metrics.target_offset_db
                                        : std::numeric_limits<double>::quiet_NaN();
        for (auto& r : reports) {
            if (r.reduction && reference && r.trace.ok())
                r.threshold_index = metrics::iterations_to_threshold(r.reduction->per_window, target);
        }

        const auto dir = cfg.output_dir;
        std::filesystem::create_directories(dir);

        csv::Table sig{{"iteration", "x", "d"}, {}};
        for (std::size_t n = 0; n < cfg.iterations; ++n)
            sig.rows.push_back({std::to_string(n), format_number(inputs.x.samples[n]), format_number(d[n])});
        csv::write(dir / kSignalsFile, sig);

        for (const auto& r : reports) {
            csv::Table t{{"iteration", "e", "y", "y_prime", "lambda_eff", "mu_eff"}, {}};
            t.rows.reserve(r.trace.size());
            for (std::size_t n = 0; n < r.trace.size(); ++n)
                t.rows.push_back({std::to_string(n), format_number(r.trace.e[n]),
                                  format_number(r.trace.y[n]), format_number(r.trace.y_prime[n]),
                                  format_number(r.trace.lambda_eff[n]), format_number(r.trace.mu_eff[n])});
            csv::write(dir / trace_file(r.entry->name), t);
        }

        const std::size_t windows = cfg.iterations / cfg.metrics.window;
        csv::Table nr{{"window", "end_iteration"}, {}};
        for (const auto& r : reports)
            nr.header.push_back(r.entry->name);
        for (std::size_t w = 0; w < windows; ++w) {
            std::vector<std::string> row{std::to_string(w), std::to_string((w + 1) * cfg.metrics.window)};
            for (const auto& r : reports) {
                const bool have = r.reduction && w < r.reduction->per_window.size();
                row.push_back(have ? cell(r.reduction->per_window.values[w]) : "undefined");
            }
            nr.rows.push_back(std::move(row));
        }
        csv::write(dir / kNoiseReductionFile, nr);

        csv::Table conv{{"iteration"}, {}};
        for (const auto& r : reports)
            conv.header.push_back(r.entry->name);
        for (std::size_t n = 0; n < cfg.iterations; ++n) {
            std::vector<std::string> row{std::to_string(n)};
            for (const auto& r : reports)
                row.push_back(n < r.convergence.size() ? cell(r.convergence.values[n]) : "undefined");
            conv.rows.push_back(std::move(row));
        }
        csv::write(dir / kConvergenceFile, conv);

        csv::Table met{{"controller", "kind", "status", "final_r_db", "whole_run_r_db", "target_db",
                        "threshold_window", "iterations_to_threshold"},
                       {}};
        for (const auto& r : reports) {
            std::optional<std::size_t> iters;
            if (r.threshold_index)
                iters = metrics::window_end_iteration(r.reduction->per_window, *r.threshold_index);
            met.rows.push_back({r.entry->name, anc::to_string(r.entry->config.kind),
                                r.trace.ok() ? "ok" : "diverged",
                                cell(r.final_r_db),
                                r.trace.ok() && r.reduction ? cell(r.reduction->whole_run_db) : "undefined",
                                cell(target), cell(r.threshold_index), cell(iters)});
        }
        csv::write(dir / kMetricsFile, met);

        const auto s_hat_file = dir / "s_hat.txt";
        paths::save_fir_file(inputs.model_s_hat, s_hat_file);

        json controllers = json::array();
        bool diverged = false;
        for (const auto& r : reports) {
            json c = {{"name", r.entry->name},
                      {"kind", anc::to_string(r.entry->config.kind)},
                      {"status", r.trace.ok() ? "ok" : "diverged"},
                      {"samples", r.trace.size()},
                      {"trace_file", trace_file(r.entry->name)},
                      {"final_taps", r.trace.final_taps}};
            if (r.trace.divergence) {
                diverged = true;
                c["diverged_at"] = r.trace.divergence->iteration;
                c["message"] = r.trace.divergence->message;
            }
            controllers.push_back(std::move(c));
        }
        const json manifest = {
            {"format_version", 1},
            {"scenario_hash", scenario::scenario_hash(cfg)},
            {"config", scenario::to_json(cfg)},
            {"plant",
             {{"primary_taps", taps_of(prepared.primary)},
              {"secondary_taps", taps_of(inputs.plant_s)},
              {"s_hat_taps", taps_of(inputs.model_s_hat)},
              {"identification_error_power", prepared.identification_error_power}}},
            {"defaults",
             {{"noise_reduction_cap_db", metrics::kCapDb},
              {"convergence_floor_db", -metrics::kCapDb},
              {"divergence_factor", anc::kDivergenceFactor},
              {"identification_divergence_ratio", 1e6}}},
            {"target_db", reference ? json(target) : json(nullptr)},
            {"controllers", controllers},
            {"files",
             {kSignalsFile, kNoiseReductionFile, kConvergenceFile, kMetricsFile, "s_hat.txt"}},
        };
        write_text(dir / kManifestFile, manifest.dump(2) + "\n");

        out << "scenario " << cfg.name << " (" << cfg.iterations << " iterations) -> " << dir.string()
            << '\n';
        for (const auto& r : reports) {
            out << "  " << r.entry->name << ": ";
            if (r.trace.ok())
                out << "final R " << cell(r.final_r_db) << " dB, reaches target after "
                    << (r.threshold_index ? std::to_string(metrics::window_end_iteration(
                                                r.reduction->per_window, *r.threshold_index))
                                          : std::string("never"))
                    << '\n';
            else
                out << "DIVERGED - " << r.trace.divergence->message << '\n';
        }
        if (diverged) {
            err << "error: at least one controller diverged (see manifest)\n";
            return kDiverged;
        }
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

int identify_command(const IdentifyOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const auto s = paths::resolve_filter(options.secondary_path);
        const auto id = paths::identify_secondary_path(s, options.order, options.excitation_length,
                                                       options.step_size, options.seed);
        out << "# identified " << s.label() << ": " << options.order << " taps, "
            << options.excitation_length << " samples, step " << format_number(options.step_size)
            << ", final error power " << format_number(id.final_error_power) << '\n';
        for (double t : id.model.taps())
            out << format_number(t) << '\n';
        if (options.output)
            paths::save_fir_file(id.model, *options.output);
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

} // namespace fxlab::cli
