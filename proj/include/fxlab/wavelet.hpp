#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fxlab::wavelet {

enum class Family { Haar, Db2, Db4 };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// Orthonormal scaling (lowpass) filter of the family.
std::span<const double> scaling_filter(Family family);

struct WaveletSpec {
    Family family = Family::Haar;
    std::size_t levels = 2;
    std::size_t block_length = 64;

    /// block_length must be a power of two with levels <= log2(block_length).
    void validate() const;
};

/// details[0] is the finest level; approximation belongs to the coarsest.
struct CoefficientSet {
    std::vector<double> approximation;
    std::vector<std::vector<double>> details;

    std::size_t size() const noexcept;
};

/// Multi-level orthogonal DWT with periodic extension.
CoefficientSet dwt(std::span<const double> block, const WaveletSpec& spec);
std::vector<double> idwt(const CoefficientSet& coeffs, const WaveletSpec& spec);

enum class ThresholdKind { Hard, Soft };
enum class Adaptation { Fixed, Variable };

std::string to_string(ThresholdKind kind);
std::string to_string(Adaptation adaptation);
ThresholdKind threshold_kind_from_string(const std::string& name);
Adaptation adaptation_from_string(const std::string& name);

inline constexpr double kDefaultLambda = 0.45;
inline constexpr double kDefaultErrorClamp = 0.95;
inline constexpr double kDefaultLambdaMaxFactor = 10.0;

struct ThresholdPolicy {
    ThresholdKind kind = ThresholdKind::Soft;
    double base_lambda = kDefaultLambda;
    Adaptation adaptation = Adaptation::Fixed;
    // |e| is clamped to this before entering 1 / (1 - |e|).
    double error_clamp = kDefaultErrorClamp;
    double lambda_max = kDefaultLambdaMaxFactor * kDefaultLambda;

    static ThresholdPolicy make(ThresholdKind kind, double base_lambda, Adaptation adaptation);
    void validate() const;
};

/// 0 where |y| <= lambda, y elsewhere.
double threshold_hard(double y, double lambda) noexcept;
/// 0 where |y| <= lambda, sign(y)(|y| - lambda) elsewhere.
double threshold_soft(double y, double lambda) noexcept;
double apply_threshold(ThresholdKind kind, double y, double lambda) noexcept;

/// Fixed: base_lambda. Variable: base_lambda / (1 - min(|e_n|, error_clamp)),
/// capped at lambda_max.
double effective_lambda(const ThresholdPolicy& policy, double e_n) noexcept;

/// dwt -> threshold detail coefficients (approximation untouched) -> idwt.
std::vector<double> denoise_block(std::span<const double> block, const WaveletSpec& spec,
                                  const ThresholdPolicy& policy, double e_n);
std::vector<double> denoise_block_at(std::span<const double> block, const WaveletSpec& spec,
                                     ThresholdKind kind, double lambda);

/// Which sample of the reconstructed sliding block is emitted.
enum class OutputTap { Center, Newest };

std::string to_string(OutputTap tap);
OutputTap output_tap_from_string(const std::string& name);

/// Streams a signal through denoise_block one sample at a time: the window
/// holds the most recent block_length inputs (zero-initialized) and advances
/// by one sample per call.
class SlidingDenoiser {
public:
    SlidingDenoiser(WaveletSpec spec, ThresholdKind kind, OutputTap tap);

    double process(double sample, double lambda);
    void reset();

    /// Samples of delay between the input and the emitted block position.
    std::size_t output_age() const noexcept;

private:
    WaveletSpec spec_;
    ThresholdKind kind_;
    OutputTap tap_;
    std::vector<double> history_; // oldest first
    std::vector<double> scratch_;
};

} // namespace fxlab::wavelet
