#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fxlab/anc.hpp"
#include "fxlab/error.hpp"
#include "fxlab/paths.hpp"
#include "fxlab/signals.hpp"

namespace fxlab::scenario {

/// Every problem found while validating a config, reported together.
class ConfigError : public ValidationError {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

enum class SHatMode { Perfect, Identified };

std::string to_string(SHatMode mode);

struct SecondaryModelSettings {
    SHatMode mode = SHatMode::Identified;
    std::size_t order = 16;
    std::size_t excitation_length = 20000;
    double step_size = paths::kDefaultIdentificationStep;
};

struct MetricsSettings {
    std::size_t window = 1000;      // noise-reduction window
    std::size_t smoothing = 200;    // convergence-curve RMS window
    std::size_t final_span = 1000;  // samples used for the final R
    double target_offset_db = 3.0;  // target = final R of fxlms minus this
};

struct ControllerEntry {
    std::string name;
    anc::ControllerConfig config;
};

struct ScenarioConfig {
    std::string name = "unnamed";
    double sample_rate_hz = signals::kDefaultSampleRateHz;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    signals::SourceSpec source;
    std::string primary_path = "builtin:primary-default";
    std::string secondary_path = "builtin:secondary-default";
    SecondaryModelSettings s_hat;
    // White noise added to the secondary-path output y'(n).
    double secondary_noise_variance = 0.0;
    std::vector<ControllerEntry> controllers;
    MetricsSettings metrics;
    std::filesystem::path output_dir = "runs/unnamed";
    // Directory against which relative file references resolve.
    std::filesystem::path base_dir;
};

/// Reads a JSON scenario file (see config/scenario.schema.json).
nlohmann::json load_config_document(const std::filesystem::path& path);

/// Applies `key=value` with a dotted key ("controllers.1.mu_base"). The value
/// is parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Validates and resolves a document. Filter references are resolved (files
/// read) here so a bad path fails before any simulation starts.
ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Fully resolved config, defaults included.
nlohmann::json to_json(const ScenarioConfig& config);

/// Stable hash of everything that defines the plant, signals and metrics
/// (controllers and output location excluded).
std::string scenario_hash(const ScenarioConfig& config);

/// Independent seeds for the source noise, the secondary-path noise and the
/// identification excitation, derived from the scenario seed.
enum class SeedStream : std::uint64_t { Source = 1, SecondaryNoise = 2, Identification = 3 };
std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream);

/// Plant, signals and S-hat ready for run_simulation.
struct PreparedScenario {
    anc::SimulationInputs inputs;
    paths::FirFilter primary;
    double identification_error_power = 0.0;
};

PreparedScenario prepare(const ScenarioConfig& config);

} // namespace fxlab::scenario
