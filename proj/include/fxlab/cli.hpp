#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fxlab::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,    // validation, I/O, unknown names
    kDiverged = 2,   // at least one controller diverged; outputs still written
};

struct RunOptions {
    std::filesystem::path config_path;
    std::vector<std::string> overrides; // key=value
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
};

/// Runs every controller of a scenario on one plant/source realization and
/// writes traces, metrics and a manifest into the output directory.
int run_command(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Compares runs of the same scenario; writes comparison.csv and
/// overlay_noise_reduction.csv into `output_dir`.
int compare_command(const std::vector<std::filesystem::path>& run_dirs,
                    const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err);

/// Figure names accepted by plot_command.
std::vector<std::string> plot_names();

/// Renders plot_<which>.svg inside the run directory (or `output` if given).
int plot_command(const std::filesystem::path& run_dir, const std::string& which,
                 const std::optional<std::filesystem::path>& output, std::ostream& out,
                 std::ostream& err);

struct IdentifyOptions {
    std::string secondary_path = "builtin:secondary-default";
    std::size_t order = 16;
    std::size_t excitation_length = 20000;
    double step_size = 0.01;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> output;
};

int identify_command(const IdentifyOptions& options, std::ostream& out, std::ostream& err);

} // namespace fxlab::cli
