#include "fxlab/paths.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fxlab/error.hpp"
#include "fxlab/format.hpp"

namespace fxlab::paths {

FirFilter::FirFilter(std::vector<double> taps, std::string label)
    : taps_(std::move(taps)), label_(std::move(label)) {
    if (taps_.empty())
        throw ValidationError("FIR filter '" + label_ + "' has no taps");
    for (std::size_t i = 0; i < taps_.size(); ++i) {
        if (!std::isfinite(taps_[i]))
            throw ValidationError("FIR filter '" + label_ + "' has a non-finite tap at index " +
                                  std::to_string(i));
    }
}

std::size_t FirFilter::delay() const noexcept {
    const auto it = std::find_if(taps_.begin(), taps_.end(), [](double t) { return t != 0.0; });
    return static_cast<std::size_t>(it - taps_.begin());
}

DelayLine::DelayLine(std::size_t capacity) : buffer_(2 * capacity, 0.0), capacity_(capacity) {
    if (capacity == 0)
        throw ValidationError("delay line capacity must be positive");
}

void DelayLine::push(double x) noexcept {
    head_ = head_ == 0 ? capacity_ - 1 : head_ - 1;
    buffer_[head_] = x;
    buffer_[head_ + capacity_] = x;
}

void DelayLine::reset() noexcept {
    std::fill(buffer_.begin(), buffer_.end(), 0.0);
    head_ = 0;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

double filter_sample(const FirFilter& f, DelayLine& line, double x_n) {
    if (line.capacity() != f.size())
        throw ValidationError("delay line capacity " + std::to_string(line.capacity()) +
                              " does not match " + std::to_string(f.size()) + " taps of '" +
                              f.label() + "'");
    line.push(x_n);
    return dot(f.taps(), line.window());
}

signals::SignalBuffer filter_buffer(const FirFilter& f, const signals::SignalBuffer& input) {
    if (input.empty())
        throw ValidationError("filter_buffer: empty input");
    signals::SignalBuffer out;
    out.sample_rate_hz = input.sample_rate_hz;
    out.samples.assign(input.size(), 0.0);
    const auto taps = f.taps();
    for (std::size_t n = 0; n < input.size(); ++n) {
        double acc = 0.0;
        const std::size_t kmax = std::min(taps.size(), n + 1);
        for (std::size_t k = 0; k < kmax; ++k)
            acc += taps[k] * input.samples[n - k];
        out.samples[n] = acc;
    }
    return out;
}

IdentificationResult identify_secondary_path(const FirFilter& true_s, std::size_t model_order,
                                             std::size_t excitation_length, double step_size,
                                             std::uint64_t seed) {
    if (model_order == 0)
        throw ValidationError("identification model order must be positive");
    if (excitation_length == 0)
        throw ValidationError("identification excitation length must be positive");
    if (!(step_size > 0.0) || !std::isfinite(step_size))
        throw ValidationError("identification step size must be positive");

    const auto excitation = signals::gaussian_noise(seed, excitation_length, 1.0);
    DelayLine plant_line(true_s.size());
    DelayLine model_line(model_order);
    std::vector<double> w(model_order, 0.0);

    constexpr double kInputPower = 1.0;
    constexpr double kDivergenceRatio = 1e6;
    constexpr std::size_t kGuardWindow = 64;
    const std::size_t tail_start = excitation_length - std::max<std::size_t>(1, excitation_length / 10);

    double guard_acc = 0.0;
    double tail_acc = 0.0;
    for (std::size_t n = 0; n < excitation_length; ++n) {
        const double x = excitation[n];
        const double desired = filter_sample(true_s, plant_line, x);
        model_line.push(x);
        const auto window = model_line.window();
        const double e = desired - dot(w, window);
        if (!std::isfinite(e))
            throw DivergenceError("secondary-path identification diverged at sample " +
                                      std::to_string(n) + " with step size " + format_number(step_size),
                                  n);
        for (std::size_t k = 0; k < model_order; ++k)
            w[k] += step_size * e * window[k];

        guard_acc += e * e;
        if ((n + 1) % kGuardWindow == 0) {
            if (guard_acc / kGuardWindow > kDivergenceRatio * kInputPower)
                throw DivergenceError("secondary-path identification diverged by sample " +
                                          std::to_string(n) + " with step size " +
                                          format_number(step_size),
                                      n);
            guard_acc = 0.0;
        }
        if (n >= tail_start)
            tail_acc += e * e;
    }
    const double tail_len = static_cast<double>(excitation_length - tail_start);
    return {FirFilter(std::move(w), "identified(" + true_s.label() + ")"), tail_acc / tail_len};
}

FirFilter load_fir_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open coefficient file " + path.string());
    std::vector<double> taps;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(first, last - first + 1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": not a number: '" + token + "'");
        taps.push_back(value);
    }
    if (taps.empty())
        throw ValidationError(path.string() + ": no coefficients");
    return FirFilter(std::move(taps), path.stem().string());
}

void save_fir_file(const FirFilter& f, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << "# " << f.label() << " (" << f.size() << " taps)\n";
    for (double t : f.taps())
        out << format_number(t) << '\n';
    if (!out)
        throw IoError("failed writing " + path.string());
}

namespace {

// Delayed, exponentially decaying resonance.
std::vector<double> decaying_response(std::size_t length, std::size_t delay, double gain,
                                      double decay, double omega) {
    std::vector<double> taps(length, 0.0);
    for (std::size_t k = delay; k < length; ++k) {
        const double t = static_cast<double>(k - delay);
        taps[k] = gain * std::pow(decay, t) * std::cos(omega * t);
    }
    return taps;
}

} // namespace

FirFilter builtin_filter(const std::string& name) {
    if (name == "primary-default")
        return FirFilter(decaying_response(32, 6, 0.9, 0.8, 0.6), "primary-default");
    if (name == "secondary-default")
        return FirFilter(decaying_response(16, 2, 0.8, 0.6, 0.9), "secondary-default");
    if (name == "identity")
        return FirFilter({1.0}, "identity");
    if (name.rfind("delay-", 0) == 0) {
        std::size_t n = 0;
        const char* first = name.data() + 6;
        const char* last = name.data() + name.size();
        const auto [ptr, ec] = std::from_chars(first, last, n);
        if (ec == std::errc{} && ptr == last && first != last && n <= 4096) {
            std::vector<double> taps(n + 1, 0.0);
            taps[n] = 1.0;
            return FirFilter(std::move(taps), name);
        }
    }
    throw ValidationError("unknown built-in filter '" + name + "'");
}

std::vector<std::string> builtin_filter_names() {
    return {"primary-default", "secondary-default", "identity", "delay-<n>"};
}

FirFilter resolve_filter(const std::string& ref, const std::filesystem::path& base_dir) {
    static constexpr std::string_view kPrefix = "builtin:";
    if (ref.rfind(kPrefix, 0) == 0)
        return builtin_filter(ref.substr(kPrefix.size()));
    std::filesystem::path p(ref);
    if (p.is_relative() && !base_dir.empty())
        p = base_dir / p;
    return load_fir_file(p);
}

} // namespace fxlab::paths
