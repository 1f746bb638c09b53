#include "adaffect/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace adaffect {

namespace {

uint32_t rd_u32(const unsigned char* p)
{
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const unsigned char* p)
{
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

} // namespace

AudioClip read_wav(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw ParseError("'" + path + "': truncated or non-WAV header");

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    bool have_fmt = false;
    size_t data_off = 0, data_len = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const uint32_t len = rd_u32(bytes.data() + pos + 4);
        const size_t body = pos + 8;
        if (body + len > bytes.size())
            throw ParseError("'" + path + "': truncated chunk '" + std::string(id, 4) + "'");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (len < 16) throw ParseError("'" + path + "': fmt chunk too short");
            format = rd_u16(bytes.data() + body);
            channels = rd_u16(bytes.data() + body + 2);
            rate = rd_u32(bytes.data() + body + 4);
            bits = rd_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_off = body;
            data_len = len;
        }
        pos = body + len + (len & 1); // chunks are word-aligned
    }

    if (!have_fmt || data_off == 0)
        throw ParseError("'" + path + "': missing fmt or data chunk");
    if (format != 1)
        throw ParseError("'" + path + "': unsupported format code " + std::to_string(format) +
                         " (only PCM is supported)");
    if (bits != 8 && bits != 16)
        throw ParseError("'" + path + "': unsupported bit depth " + std::to_string(bits));
    if (channels != 1 && channels != 2)
        throw ParseError("'" + path + "': unsupported channel count " + std::to_string(channels));
    if (rate == 0) throw ParseError("'" + path + "': zero sample rate");

    const size_t bytes_per_sample = bits / 8;
    const size_t frame_size = bytes_per_sample * channels;
    const size_t n_frames = data_len / frame_size;

    AudioClip clip;
    clip.sample_rate_hz = static_cast<int>(rate);
    clip.samples.resize(static_cast<Eigen::Index>(n_frames));
    const unsigned char* d = bytes.data() + data_off;
    for (size_t i = 0; i < n_frames; ++i) {
        double acc = 0;
        for (size_t c = 0; c < channels; ++c) {
            const unsigned char* s = d + i * frame_size + c * bytes_per_sample;
            if (bits == 8) {
                acc += (static_cast<double>(*s) - 128.0) / 128.0;
            } else {
                const auto v = static_cast<int16_t>(rd_u16(s));
                acc += static_cast<double>(v) / 32768.0;
            }
        }
        clip.samples[static_cast<Eigen::Index>(i)] = acc / channels;
    }
    return clip;
}

void write_wav(const AudioClip& clip, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");

    const auto n = static_cast<uint32_t>(clip.samples.size());
    const uint32_t data_len = n * 2;
    const uint32_t rate = static_cast<uint32_t>(clip.sample_rate_hz);

    auto w_u32 = [&](uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
        out.write(reinterpret_cast<char*>(b), 4);
    };
    auto w_u16 = [&](uint16_t v) {
        unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
        out.write(reinterpret_cast<char*>(b), 2);
    };

    out.write("RIFF", 4);
    w_u32(36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    w_u32(16);
    w_u16(1); // PCM
    w_u16(1); // mono
    w_u32(rate);
    w_u32(rate * 2);
    w_u16(2);
    w_u16(16);
    out.write("data", 4);
    w_u32(data_len);
    for (Eigen::Index i = 0; i < clip.samples.size(); ++i) {
        const double v = std::clamp(clip.samples[i], -1.0, 1.0);
        const long q = std::clamp(std::lround(v * 32768.0), -32768L, 32767L);
        w_u16(static_cast<uint16_t>(static_cast<int16_t>(q)));
    }
}

} // namespace adaffect
