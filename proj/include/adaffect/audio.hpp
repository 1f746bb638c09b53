#pragma once

#include "adaffect/types.hpp"

#include <string>

namespace adaffect {

/// Mono audio, samples in [-1, 1]. Multi-track input is remixed to one
/// channel at load.
struct AudioClip {
    VecX samples;
    int sample_rate_hz = 0;

    double duration_s() const
    {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

/// Reads a PCM WAV file (8/16-bit, 1-2 channels). Stereo is averaged to
/// mono; samples are normalized to [-1, 1]. Float or compressed formats are
/// rejected with an unsupported-format error.
AudioClip read_wav(const std::string& path);

/// Writes a clip as 16-bit PCM mono WAV (fixture and interchange helper).
void write_wav(const AudioClip& clip, const std::string& path);

} // namespace adaffect
