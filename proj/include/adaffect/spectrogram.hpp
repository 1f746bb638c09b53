#pragma once

#include "adaffect/audio.hpp"
#include "adaffect/types.hpp"

#include <utility>
#include <vector>

namespace adaffect {

/// STFT magnitude matrix of one audio segment. Rows are analysis windows,
/// columns the floor(window_samples/2)+1 one-sided frequency bins.
struct Spectrogram {
    MatX magnitudes; // n_windows x n_bins, nonnegative
    double window_s = 0.040;
    double hop_s = 0.020;
    std::pair<double, double> segment_span{0.0, 0.0};
    bool zero_padded = false;

    Eigen::Index n_windows() const { return magnitudes.rows(); }
    Eigen::Index n_bins() const { return magnitudes.cols(); }
};

struct StftConfig {
    double window_s = 0.040;
    double hop_s = 0.020;
};

/// |STFT| of clip[start_s, end_s) with a periodic Hann window.
Spectrogram spectrogram(const AudioClip& clip, double start_s, double end_s,
                        const StftConfig& cfg = {});

/// Cuts a clip into consecutive 10 s segments and computes one spectrogram
/// per segment. A final partial segment is dropped when shorter than
/// min_partial_s, otherwise zero-padded to the full segment length (flagged
/// in the result).
std::vector<Spectrogram> segment_spectrograms(const AudioClip& clip, double segment_s = 10.0,
                                              double min_partial_s = 2.0,
                                              const StftConfig& cfg = {});

} // namespace adaffect
