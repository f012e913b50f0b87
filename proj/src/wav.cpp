#include "fxlab/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fxlab/error.hpp"

namespace fxlab::signals {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits_per_sample = 0;
};

} // namespace

SignalBuffer load_wav(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open WAV file " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    const auto fail = [&](const std::string& why) {
        return ValidationError(path.string() + ": " + why);
    };

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw fail("not a RIFF/WAVE file");

    FormatChunk fmt;
    bool have_fmt = false;
    const std::uint8_t* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* hdr = bytes.data() + pos;
        const std::size_t size = read_u32(hdr + 4);
        const std::size_t body = pos + 8;
        const std::size_t available = std::min(size, bytes.size() - body);
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (available < 16)
                throw fail("truncated fmt chunk");
            const std::uint8_t* p = bytes.data() + body;
            fmt.format = read_u16(p);
            fmt.channels = read_u16(p + 2);
            fmt.sample_rate = read_u32(p + 4);
            fmt.bits_per_sample = read_u16(p + 14);
            if (fmt.format == kFormatExtensible) {
                if (available < 26)
                    throw fail("truncated WAVE_FORMAT_EXTENSIBLE header");
                // The sub-format GUID starts with the plain format tag.
                fmt.format = read_u16(p + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = available;
        }
        pos = body + size + (size & 1U);
    }

    if (!have_fmt)
        throw fail("missing fmt chunk");
    if (data == nullptr)
        throw fail("missing data chunk");
    if (fmt.channels == 0)
        throw fail("zero channels");
    if (fmt.sample_rate == 0)
        throw fail("zero sample rate");

    const bool int16 = fmt.format == kFormatPcm && fmt.bits_per_sample == 16;
    const bool float32 = fmt.format == kFormatFloat && fmt.bits_per_sample == 32;
    if (!int16 && !float32)
        throw fail("unsupported encoding (format tag " + std::to_string(fmt.format) + ", " +
                   std::to_string(fmt.bits_per_sample) +
                   " bits); only 16-bit PCM and 32-bit float are supported");

    const std::size_t sample_bytes = fmt.bits_per_sample / 8;
    const std::size_t frame_bytes = sample_bytes * fmt.channels;
    const std::size_t frames = data_size / frame_bytes;
    if (frames == 0)
        throw fail("no audio data");
    if (fmt.channels > 1 && warnings != nullptr)
        warnings->push_back(path.string() + ": " + std::to_string(fmt.channels) +
                            " channels, using channel 0 only");

    SignalBuffer out;
    out.sample_rate_hz = static_cast<double>(fmt.sample_rate);
    out.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const std::uint8_t* p = data + i * frame_bytes;
        if (int16) {
            const auto v = static_cast<std::int16_t>(read_u16(p));
            out.samples[i] = static_cast<double>(v) / 32768.0;
        } else {
            const std::uint32_t bits = read_u32(p);
            float v;
            std::memcpy(&v, &bits, sizeof v);
            if (!std::isfinite(v))
                throw fail("non-finite float sample at frame " + std::to_string(i));
            out.samples[i] = static_cast<double>(v);
        }
    }
    return out;
}

std::size_t save_wav(const SignalBuffer& buffer, const std::filesystem::path& path) {
    if (!(buffer.sample_rate_hz > 0.0))
        throw ValidationError("save_wav: sample rate must be positive");
    const auto rate = static_cast<std::uint32_t>(std::lround(buffer.sample_rate_hz));
    const auto data_bytes = static_cast<std::uint32_t>(buffer.samples.size() * 2);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, kFormatPcm);
    put_u16(out, 1);
    put_u32(out, rate);
    put_u32(out, rate * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    put_tag(out, "data");
    put_u32(out, data_bytes);

    std::size_t clipped = 0;
    for (double s : buffer.samples) {
        double v = s;
        if (!std::isfinite(v))
            throw ValidationError("save_wav: non-finite sample");
        if (v > 1.0 || v < -1.0) {
            v = std::clamp(v, -1.0, 1.0);
            ++clipped;
        }
        const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw IoError("cannot open " + path.string() + " for writing");
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file)
        throw IoError("failed writing " + path.string());
    return clipped;
}

} // namespace fxlab::signals
