#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fxlab/signals.hpp"

namespace fxlab::signals {

/// Reads a RIFF/WAVE file holding 16-bit integer or 32-bit float PCM.
/// Integer samples are scaled by 1/32768. Only channel 0 of a multi-channel
/// file is kept; a note is appended to `warnings` when that happens.
SignalBuffer load_wav(const std::filesystem::path& path,
                      std::vector<std::string>* warnings = nullptr);

/// Writes a mono 16-bit PCM file. Samples outside [-1, 1] are clipped;
/// returns the number of clipped samples.
std::size_t save_wav(const SignalBuffer& buffer, const std::filesystem::path& path);

} // namespace fxlab::signals
