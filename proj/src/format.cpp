#include "fxlab/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace fxlab {

std::string format_number(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ec == std::errc{} ? ptr : buf.data());
}

} // namespace fxlab
