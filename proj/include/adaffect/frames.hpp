#pragma once

#include "adaffect/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace adaffect {

/// One RGB raster, 8 bits per channel, interleaved.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb; // width * height * 3

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// Keyframes of one media item with strictly increasing timestamps and
/// uniform dimensions.
struct FrameSequence {
    std::vector<Frame> frames;
    std::vector<double> timestamps_s;

    size_t size() const { return frames.size(); }
};

/// Reads one binary PPM (P6, maxval <= 255) file.
Frame read_ppm(const std::string& path);
void write_ppm(const Frame& frame, const std::string& path);

/// Reads a directory of P6 frames named `<seconds>.ppm`, sorted by
/// timestamp. Mixed dimensions or duplicate timestamps are errors.
FrameSequence read_frames(const std::string& dir);

} // namespace adaffect
