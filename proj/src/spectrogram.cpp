#include "adaffect/spectrogram.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>

namespace adaffect {

namespace {

VecX hann_window(Eigen::Index n)
{
    VecX w(n);
    const double two_pi = 6.283185307179586476925286766559;
    for (Eigen::Index i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n)));
    return w;
}

Spectrogram stft(const VecX& samples, int fs, const StftConfig& cfg)
{
    const auto wlen = static_cast<Eigen::Index>(std::lround(cfg.window_s * fs));
    const auto hop = static_cast<Eigen::Index>(std::lround(cfg.hop_s * fs));
    if (wlen < 2 || hop < 1)
        throw ValidationError("spectrogram: window or hop too short for sample rate");
    if (samples.size() < wlen)
        throw ValidationError("spectrogram: segment shorter than one analysis window");

    const Eigen::Index n_windows = (samples.size() - wlen) / hop + 1;
    const Eigen::Index n_bins = wlen / 2 + 1;
    const VecX window = hann_window(wlen);

    Spectrogram sg;
    sg.window_s = cfg.window_s;
    sg.hop_s = cfg.hop_s;
    sg.magnitudes.resize(n_windows, n_bins);

    Eigen::FFT<double> fft;
    std::vector<double> buf(static_cast<size_t>(wlen));
    std::vector<std::complex<double>> spec;
    for (Eigen::Index w = 0; w < n_windows; ++w) {
        const Eigen::Index off = w * hop;
        for (Eigen::Index i = 0; i < wlen; ++i)
            buf[static_cast<size_t>(i)] = samples[off + i] * window[i];
        fft.fwd(spec, buf);
        for (Eigen::Index b = 0; b < n_bins; ++b)
            sg.magnitudes(w, b) = std::abs(spec[static_cast<size_t>(b)]);
    }
    return sg;
}

} // namespace

Spectrogram spectrogram(const AudioClip& clip, double start_s, double end_s,
                        const StftConfig& cfg)
{
    if (!(end_s > start_s)) throw ValidationError("spectrogram: empty segment");
    if (start_s < 0 || end_s > clip.duration_s() + 1e-9)
        throw ValidationError("spectrogram: segment [" + std::to_string(start_s) + "," +
                              std::to_string(end_s) + ") exceeds clip of " +
                              std::to_string(clip.duration_s()) + " s");
    const auto b = static_cast<Eigen::Index>(std::lround(start_s * clip.sample_rate_hz));
    const auto e = std::min(clip.samples.size(),
                            static_cast<Eigen::Index>(std::lround(end_s * clip.sample_rate_hz)));
    Spectrogram sg = stft(clip.samples.segment(b, e - b), clip.sample_rate_hz, cfg);
    sg.segment_span = {start_s, end_s};
    return sg;
}

std::vector<Spectrogram> segment_spectrograms(const AudioClip& clip, double segment_s,
                                              double min_partial_s, const StftConfig& cfg)
{
    if (segment_s <= 0) throw ValidationError("segment_spectrograms: segment_s must be positive");
    const double dur = clip.duration_s();
    std::vector<Spectrogram> out;
    double start = 0.0;
    while (start + segment_s <= dur + 1e-9) {
        out.push_back(spectrogram(clip, start, start + segment_s, cfg));
        start += segment_s;
    }
    const double rest = dur - start;
    if (rest >= min_partial_s) {
        const auto b = static_cast<Eigen::Index>(std::lround(start * clip.sample_rate_hz));
        const auto padded = static_cast<Eigen::Index>(std::lround(segment_s * clip.sample_rate_hz));
        VecX seg = VecX::Zero(padded);
        seg.head(clip.samples.size() - b) = clip.samples.tail(clip.samples.size() - b);
        Spectrogram sg = stft(seg, clip.sample_rate_hz, cfg);
        sg.segment_span = {start, start + segment_s};
        sg.zero_padded = true;
        out.push_back(std::move(sg));
    }
    return out;
}

} // namespace adaffect
