#include "fxlab/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace fxlab::scenario {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts)
        out += "\n  - " + p;
    return out;
}

// Collects problems while pulling typed fields out of a JSON object.
class Reader {
public:
    Reader(const json& obj, std::string where, std::vector<std::string>& problems)
        : obj_(obj), where_(std::move(where)), problems_(problems) {}

    bool is_object() const { return obj_.is_object(); }

    template <typename T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!obj_.is_object() || !obj_.contains(key) || obj_.at(key).is_null())
            return fallback;
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean())
                    throw std::invalid_argument("expected true or false");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number())
                    throw std::invalid_argument("expected a number");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0))
                    throw std::invalid_argument(std::is_unsigned_v<T> ? "expected a non-negative integer"
                                                                      : "expected an integer");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string())
                    throw std::invalid_argument("expected a string");
            }
            return v.get<T>();
        } catch (const std::exception& e) {
            problems_.push_back(path(key) + ": " + e.what());
            return fallback;
        }
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        seen_.insert(key);
        if (!obj_.is_object() || !obj_.contains(key) || obj_.at(key).is_null())
            return fallback;
        const json& v = obj_.at(key);
        if (v.is_number())
            return {v.get<double>()};
        if (!v.is_array()) {
            problems_.push_back(path(key) + ": expected a number or a list of numbers");
            return fallback;
        }
        std::vector<double> out;
        for (const auto& item : v) {
            if (!item.is_number()) {
                problems_.push_back(path(key) + ": expected a list of numbers");
                return fallback;
            }
            out.push_back(item.get<double>());
        }
        return out;
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        if (!obj_.is_object() || !obj_.contains(key) || obj_.at(key).is_null())
            return nullptr;
        return &obj_.at(key);
    }

    void reject_unknown() {
        if (!obj_.is_object())
            return;
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key))
                problems_.push_back(path(key) + ": unknown key");
        }
    }

    std::string path(const std::string& key) const {
        return where_.empty() ? key : where_ + "." + key;
    }
    void problem(const std::string& key, const std::string& msg) {
        problems_.push_back(path(key) + ": " + msg);
    }

private:
    const json& obj_;
    std::string where_;
    std::vector<std::string>& problems_;
    std::set<std::string> seen_;
};

// Runs `fn`, turning a ValidationError into a recorded problem.
template <typename Fn>
void capture(std::vector<std::string>& problems, const std::string& where, Fn&& fn) {
    try {
        fn();
    } catch (const ValidationError& e) {
        problems.push_back(where + ": " + e.what());
    } catch (const IoError& e) {
        problems.push_back(where + ": " + e.what());
    }
}

bool valid_name(const std::string& name) {
    if (name.empty())
        return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        if (!ok)
            return false;
    }
    return true;
}

anc::ControllerConfig parse_controller(const json& entry, const std::string& where,
                                       std::vector<std::string>& problems, std::string& name) {
    Reader r(entry, where, problems);
    anc::ControllerConfig c;
    if (!r.is_object()) {
        problems.push_back(where + ": expected an object");
        return c;
    }
    const auto kind_name = r.get<std::string>("kind", "");
    if (kind_name.empty())
        r.problem("kind", "missing controller kind");
    else
        capture(problems, r.path("kind"), [&] { c = anc::ControllerConfig::for_kind(anc::controller_kind_from_string(kind_name)); });

    name = r.get<std::string>("name", kind_name);
    c.taps = r.get<std::size_t>("taps", c.taps);
    c.mu_base = r.get<double>("mu_base", c.mu_base);
    c.mu_max = r.get<double>("mu_max", c.mu_max);
    c.error_clamp = r.get<double>("error_clamp", c.error_clamp);
    c.threshold.error_clamp = c.error_clamp;

    if (const json* t = r.child("threshold")) {
        Reader tr(*t, r.path("threshold"), problems);
        capture(problems, tr.path("kind"), [&] {
            c.threshold.kind = wavelet::threshold_kind_from_string(
                tr.get<std::string>("kind", wavelet::to_string(c.threshold.kind)));
        });
        c.threshold.base_lambda = tr.get<double>("lambda", c.threshold.base_lambda);
        c.threshold.lambda_max = tr.get<double>(
            "lambda_max", wavelet::kDefaultLambdaMaxFactor * c.threshold.base_lambda);
        tr.reject_unknown();
    }
    if (const json* w = r.child("wavelet")) {
        Reader wr(*w, r.path("wavelet"), problems);
        capture(problems, wr.path("family"), [&] {
            c.wavelet.family = wavelet::family_from_string(
                wr.get<std::string>("family", wavelet::to_string(c.wavelet.family)));
        });
        c.wavelet.levels = wr.get<std::size_t>("levels", c.wavelet.levels);
        c.wavelet.block_length = wr.get<std::size_t>("block_length", c.wavelet.block_length);
        wr.reject_unknown();
    }
    capture(problems, r.path("threshold_domain"), [&] {
        c.domain = anc::threshold_domain_from_string(
            r.get<std::string>("threshold_domain", anc::to_string(c.domain)));
    });
    capture(problems, r.path("output_tap"), [&] {
        c.output_tap = wavelet::output_tap_from_string(
            r.get<std::string>("output_tap", wavelet::to_string(c.output_tap)));
    });
    if (const json* f = r.child("features")) {
        Reader fr(*f, r.path("features"), problems);
        c.features.use_wavelet_threshold =
            fr.get<bool>("use_wavelet_threshold", c.features.use_wavelet_threshold);
        c.features.variable_threshold = fr.get<bool>("variable_threshold", c.features.variable_threshold);
        c.features.variable_step = fr.get<bool>("variable_step", c.features.variable_step);
        fr.reject_unknown();
    }
    r.reject_unknown();

    if (!valid_name(name))
        r.problem("name", "controller name '" + name +
                              "' must be non-empty and use only letters, digits, '-', '_' or '.'");
    capture(problems, where, [&] { c.validate(); });
    return c;
}

json controller_to_json(const ControllerEntry& e) {
    const auto& c = e.config;
    return {
        {"name", e.name},
        {"kind", anc::to_string(c.kind)},
        {"taps", c.taps},
        {"mu_base", c.mu_base},
        {"mu_max", c.mu_max},
        {"error_clamp", c.error_clamp},
        {"threshold",
         {{"kind", wavelet::to_string(c.threshold.kind)},
          {"lambda", c.threshold.base_lambda},
          {"lambda_max", c.threshold.lambda_max}}},
        {"wavelet",
         {{"family", wavelet::to_string(c.wavelet.family)},
          {"levels", c.wavelet.levels},
          {"block_length", c.wavelet.block_length}}},
        {"threshold_domain", anc::to_string(c.domain)},
        {"output_tap", wavelet::to_string(c.output_tap)},
        {"features",
         {{"use_wavelet_threshold", c.features.use_wavelet_threshold},
          {"variable_threshold", c.features.variable_threshold},
          {"variable_step", c.features.variable_step}}},
    };
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ValidationError("invalid scenario config:" + join(problems)), problems_(std::move(problems)) {}

std::string to_string(SHatMode mode) {
    return mode == SHatMode::Perfect ? "perfect" : "identified";
}

json load_config_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            throw ValidationError("override key '" + key + "' has an empty component");
        const bool last = dot == std::string::npos;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoul(part, &used);
                if (used != part.size())
                    throw std::invalid_argument(part);
            } catch (const std::exception&) {
                throw ValidationError("override key '" + key + "': '" + part +
                                      "' is not a list index");
            }
            if (idx >= node->size())
                throw ValidationError("override key '" + key + "': index " + part +
                                      " out of range");
            node = &(*node)[idx];
        } else {
            if (node->is_null())
                *node = json::object();
            if (!node->is_object())
                throw ValidationError("override key '" + key + "': '" + part +
                                      "' does not name an object member");
            node = &(*node)[part];
        }
        if (last)
            break;
        start = dot + 1;
    }
    *node = std::move(value);
}

ScenarioConfig parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
    std::vector<std::string> problems;
    ScenarioConfig cfg;
    cfg.base_dir = base_dir;
    if (!doc.is_object())
        throw ConfigError({"config root must be an object"});

    Reader r(doc, "", problems);
    cfg.name = r.get<std::string>("name", cfg.name);
    cfg.sample_rate_hz = r.get<double>("sample_rate_hz", cfg.sample_rate_hz);
    cfg.iterations = r.get<std::size_t>("iterations", 0);
    cfg.seed = r.get<std::uint64_t>("seed", cfg.seed);
    cfg.primary_path = r.get<std::string>("primary_path", cfg.primary_path);
    cfg.secondary_path = r.get<std::string>("secondary_path", cfg.secondary_path);
    cfg.secondary_noise_variance = r.get<double>("secondary_noise_variance", 0.0);
    cfg.output_dir = r.get<std::string>("output_dir", "runs/" + cfg.name);

    if (!(cfg.sample_rate_hz > 0.0))
        r.problem("sample_rate_hz", "must be positive");
    if (cfg.iterations == 0)
        r.problem("iterations", "must be a positive integer");
    if (!(cfg.secondary_noise_variance >= 0.0))
        r.problem("secondary_noise_variance", "must be non-negative");

    if (const json* s = r.child("source")) {
        Reader sr(*s, "source", problems);
        capture(problems, "source.kind", [&] {
            cfg.source.kind = signals::source_kind_from_string(sr.get<std::string>("kind", "sinusoid"));
        });
        cfg.source.frequency_hz = sr.numbers("frequency_hz", {});
        cfg.source.amplitude = sr.numbers("amplitude", {1.0});
        cfg.source.noise_variance = sr.get<double>("noise_variance", 0.0);
        cfg.source.seed = sr.get<std::uint64_t>("seed", derive_seed(cfg.seed, SeedStream::Source));
        const auto path = sr.get<std::string>("path", "");
        if (!path.empty()) {
            std::filesystem::path p(path);
            cfg.source.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        }
        sr.reject_unknown();
    } else {
        r.problem("source", "missing source section");
    }
    cfg.source.length_samples = cfg.iterations;
    if (cfg.iterations > 0 && cfg.sample_rate_hz > 0.0) {
        capture(problems, "source", [&] {
            cfg.source.validate(cfg.sample_rate_hz);
            if (cfg.source.kind == signals::SourceKind::File && !std::filesystem::exists(cfg.source.path))
                throw IoError("source file " + cfg.source.path.string() + " does not exist");
        });
    }

    capture(problems, "primary_path", [&] { paths::resolve_filter(cfg.primary_path, base_dir); });
    capture(problems, "secondary_path", [&] { paths::resolve_filter(cfg.secondary_path, base_dir); });

    if (const json* s = r.child("s_hat")) {
        Reader hr(*s, "s_hat", problems);
        const auto mode = hr.get<std::string>("mode", "identified");
        if (mode == "perfect")
            cfg.s_hat.mode = SHatMode::Perfect;
        else if (mode == "identified")
            cfg.s_hat.mode = SHatMode::Identified;
        else
            hr.problem("mode", "expected perfect or identified, got '" + mode + "'");
        cfg.s_hat.order = hr.get<std::size_t>("order", cfg.s_hat.order);
        cfg.s_hat.excitation_length = hr.get<std::size_t>("excitation_length", cfg.s_hat.excitation_length);
        cfg.s_hat.step_size = hr.get<double>("step_size", cfg.s_hat.step_size);
        if (cfg.s_hat.order == 0)
            hr.problem("order", "must be positive");
        if (cfg.s_hat.excitation_length == 0)
            hr.problem("excitation_length", "must be positive");
        if (!(cfg.s_hat.step_size > 0.0))
            hr.problem("step_size", "must be positive");
        hr.reject_unknown();
    }

    if (const json* m = r.child("metrics")) {
        Reader mr(*m, "metrics", problems);
        cfg.metrics.window = mr.get<std::size_t>("window", cfg.metrics.window);
        cfg.metrics.smoothing = mr.get<std::size_t>("smoothing", cfg.metrics.smoothing);
        cfg.metrics.final_span = mr.get<std::size_t>("final_span", cfg.metrics.final_span);
        cfg.metrics.target_offset_db = mr.get<double>("target_offset_db", cfg.metrics.target_offset_db);
        mr.reject_unknown();
    }
    if (cfg.metrics.window == 0 || (cfg.iterations > 0 && cfg.metrics.window > cfg.iterations))
        problems.push_back("metrics.window: must lie in [1, iterations]");
    if (cfg.metrics.smoothing == 0)
        problems.push_back("metrics.smoothing: must be at least 1");
    if (cfg.metrics.final_span == 0 || (cfg.iterations > 0 && cfg.metrics.final_span > cfg.iterations))
        problems.push_back("metrics.final_span: must lie in [1, iterations]");

    json defaults = json::object();
    if (const json* d = r.child("controller_defaults")) {
        if (d->is_object())
            defaults = *d;
        else
            problems.push_back("controller_defaults: expected an object");
    }
    const json* list = r.child("controllers");
    if (list == nullptr || !list->is_array() || list->empty()) {
        problems.push_back("controllers: at least one controller must be listed");
    } else {
        std::set<std::string> names;
        for (std::size_t i = 0; i < list->size(); ++i) {
            json merged = defaults;
            merged.merge_patch((*list)[i]);
            if (!(*list)[i].is_object())
                merged = (*list)[i];
            const std::string where = "controllers[" + std::to_string(i) + "]";
            std::string name;
            auto c = parse_controller(merged, where, problems, name);
            if (!names.insert(name).second)
                problems.push_back(where + ".name: duplicate controller name '" + name + "'");
            cfg.controllers.push_back({name, c});
        }
    }
    r.reject_unknown();

    if (!problems.empty())
        throw ConfigError(std::move(problems));
    return cfg;
}

json to_json(const ScenarioConfig& cfg) {
    json controllers = json::array();
    for (const auto& c : cfg.controllers)
        controllers.push_back(controller_to_json(c));
    return {
        {"name", cfg.name},
        {"sample_rate_hz", cfg.sample_rate_hz},
        {"iterations", cfg.iterations},
        {"seed", cfg.seed},
        {"source",
         {{"kind", signals::to_string(cfg.source.kind)},
          {"frequency_hz", cfg.source.frequency_hz},
          {"amplitude", cfg.source.amplitude},
          {"noise_variance", cfg.source.noise_variance},
          {"seed", cfg.source.seed},
          {"path", cfg.source.path.string()}}},
        {"primary_path", cfg.primary_path},
        {"secondary_path", cfg.secondary_path},
        {"s_hat",
         {{"mode", to_string(cfg.s_hat.mode)},
          {"order", cfg.s_hat.order},
          {"excitation_length", cfg.s_hat.excitation_length},
          {"step_size", cfg.s_hat.step_size}}},
        {"secondary_noise_variance", cfg.secondary_noise_variance},
        {"controllers", controllers},
        {"metrics",
         {{"window", cfg.metrics.window},
          {"smoothing", cfg.metrics.smoothing},
          {"final_span", cfg.metrics.final_span},
          {"target_offset_db", cfg.metrics.target_offset_db}}},
        {"output_dir", cfg.output_dir.string()},
    };
}

std::string scenario_hash(const ScenarioConfig& cfg) {
    json doc = to_json(cfg);
    doc.erase("controllers");
    doc.erase("output_dir");
    doc.erase("name");
    const auto p = paths::resolve_filter(cfg.primary_path, cfg.base_dir);
    const auto s = paths::resolve_filter(cfg.secondary_path, cfg.base_dir);
    doc["primary_taps"] = std::vector<double>(p.taps().begin(), p.taps().end());
    doc["secondary_taps"] = std::vector<double>(s.taps().begin(), s.taps().end());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(doc.dump())));
    return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(stream);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

PreparedScenario prepare(const ScenarioConfig& cfg) {
    auto primary = paths::resolve_filter(cfg.primary_path, cfg.base_dir);
    auto secondary = paths::resolve_filter(cfg.secondary_path, cfg.base_dir);
    auto x = signals::generate(cfg.source, cfg.sample_rate_hz);

    double id_power = 0.0;
    paths::FirFilter s_hat = secondary;
    if (cfg.s_hat.mode == SHatMode::Identified) {
        auto id = paths::identify_secondary_path(secondary, cfg.s_hat.order,
                                                 cfg.s_hat.excitation_length, cfg.s_hat.step_size,
                                                 derive_seed(cfg.seed, SeedStream::Identification));
        s_hat = std::move(id.model);
        id_power = id.final_error_power;
    }
    std::vector<double> noise;
    if (cfg.secondary_noise_variance > 0.0)
        noise = signals::gaussian_noise(derive_seed(cfg.seed, SeedStream::SecondaryNoise),
                                        cfg.iterations, cfg.secondary_noise_variance);
    auto inputs = anc::make_inputs(std::move(x), primary, std::move(secondary), std::move(s_hat),
                                   std::move(noise));
    return {std::move(inputs), std::move(primary), id_power};
}

} // namespace fxlab::scenario
