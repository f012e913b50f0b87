#include <iostream>

#include <CLI11.hpp>

#include "fxlab/cli.hpp"

int main(int argc, char** argv) {
    using namespace fxlab;

    CLI::App app{"fxlab: filtered-x LMS active noise control experiments"};
    app.require_subcommand(1);

    cli::RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run every controller of a scenario");
    run_cmd->add_option("config", run.config_path, "Scenario config (JSON)")->required();
    run_cmd->add_option("--set", run.overrides, "Override a config value, key=value (repeatable)");
    run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
    run_cmd->add_option("--out", run.output_dir, "Output directory");

    std::vector<std::filesystem::path> compare_dirs;
    std::filesystem::path compare_out = "comparison";
    auto* compare_cmd = app.add_subcommand("compare", "Compare runs of the same scenario");
    compare_cmd->add_option("dirs", compare_dirs, "Run directories")->required()->expected(2, -1);
    compare_cmd->add_option("--out", compare_out, "Directory for comparison outputs")->capture_default_str();

    std::filesystem::path plot_dir;
    std::string which;
    std::optional<std::filesystem::path> plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "Render an SVG figure from a run directory");
    plot_cmd->add_option("dir", plot_dir, "Run directory")->required();
    plot_cmd->add_option("--which", which, "Figure: noise-reduction, convergence, residual, signal")
        ->required();
    plot_cmd->add_option("--out", plot_out, "SVG output path");

    cli::IdentifyOptions id;
    auto* id_cmd = app.add_subcommand("identify", "Identify a secondary path with LMS");
    id_cmd->add_option("--secondary", id.secondary_path, "Filter file or builtin:<name>")->capture_default_str();
    id_cmd->add_option("--order", id.order, "Model taps")->capture_default_str();
    id_cmd->add_option("--length", id.excitation_length, "Excitation samples")->capture_default_str();
    id_cmd->add_option("--mu", id.step_size, "LMS step size")->capture_default_str();
    id_cmd->add_option("--seed", id.seed, "Excitation seed")->capture_default_str();
    id_cmd->add_option("--out", id.output, "Write the model taps to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*run_cmd)
        return cli::run_command(run, std::cout, std::cerr);
    if (*compare_cmd)
        return cli::compare_command(compare_dirs, compare_out, std::cout, std::cerr);
    if (*plot_cmd)
        return cli::plot_command(plot_dir, which, plot_out, std::cout, std::cerr);
    return cli::identify_command(id, std::cout, std::cerr);
}
