#pragma once

#include "adaffect/audio.hpp"
#include "adaffect/frames.hpp"
#include "adaffect/types.hpp"

#include <map>
#include <string>

namespace adaffect {

/// Per-second arousal or valence trajectory in [0,1], with the component
/// curves and weights it was assembled from.
struct AffectCurve {
    VecX values; // one entry per second, all in [0,1]
    Dimension dimension = Dimension::Arousal;
    std::map<std::string, VecX> components;
    std::map<std::string, double> weights; // sum to 1
};

enum class SmootherKind { Kaiser, Triangular };

struct SmootherConfig {
    bool enabled = true;
    int length_s = 11; // odd, symmetric
    double kaiser_beta = 5.0;
    SmootherKind kind = SmootherKind::Kaiser;
};

struct HanjalicConfig {
    double arousal_weights[3] = {1.0 / 3, 1.0 / 3, 1.0 / 3}; // motion, shot_rate, energy
    double valence_weights[2] = {0.5, 0.5};                  // pitch, color
    SmootherConfig smoother;
    bool normalize = true;
    double shot_threshold_k = 3.0;
    double voicing_threshold = 0.5;
};

/// Maps [min,max] of the sequence onto [0,1]; constant sequences map to 0.
VecX minmax_normalize(const VecX& v);

/// Symmetric nonnegative smoothing taps summing to 1.
VecX smoother_window(const SmootherConfig& cfg);

/// Same-length convolution with edge renormalization (taps falling outside
/// the curve are excluded and the rest rescaled).
VecX smooth_curve(const VecX& v, const VecX& taps);

/// Mean squared amplitude per 1 s bin, min-max normalized over the clip.
VecX audio_energy_curve(const AudioClip& clip);

/// Autocorrelation pitch per second (Hz, 0 where unvoiced): 40 ms analysis
/// windows, 50-500 Hz search range, voicing threshold on the normalized
/// autocorrelation peak, per-second median of voiced windows.
VecX pitch_curve(const AudioClip& clip, double voicing_threshold = 0.5);

/// Mean absolute luminance difference between consecutive frames, assigned
/// to the later frame's second and resampled to 1 Hz. Luminance differences
/// are already on a [0,1] scale, which is kept as-is so that maximal motion
/// reads 1 and stillness 0.
VecX motion_activity_curve(const FrameSequence& frames, int n_seconds = 0);

/// Shot boundaries (frame difference above mean + k*std, nonzero) counted
/// over a sliding 10 s window per second, min-max normalized.
VecX shot_change_curve(const FrameSequence& frames, int n_seconds = 0, double threshold_k = 3.0);

/// Indices (into the later frame) of detected shot boundaries.
std::vector<size_t> shot_boundaries(const FrameSequence& frames, double threshold_k = 3.0);

/// Mean HSV brightness x saturation per keyframe, resampled to 1 Hz,
/// min-max normalized.
VecX color_score_curve(const FrameSequence& frames, int n_seconds = 0);

/// A(t) = weighted sum of motion, shot-rate and sound-energy components,
/// smoothed and re-normalized to [0,1].
AffectCurve hanjalic_arousal(const VecX& motion, const VecX& shot_rate, const VecX& energy,
                             const HanjalicConfig& cfg = {});

/// V(t) = weighted sum of the normalized pitch deviation from the clip
/// median (voiced seconds) and the color score, smoothed and normalized.
AffectCurve hanjalic_valence(const VecX& pitch_hz, const VecX& color,
                             const HanjalicConfig& cfg = {});

/// Convenience driver: component extraction plus both curves for one ad.
struct HanjalicCurves {
    AffectCurve arousal;
    AffectCurve valence;
};
HanjalicCurves hanjalic_pipeline(const AudioClip& clip, const FrameSequence& frames,
                                 const HanjalicConfig& cfg = {});

enum class CurveWindow { All, Last30s, Last10s };

inline const char* curve_window_name(CurveWindow w)
{
    switch (w) {
        case CurveWindow::All: return "all";
        case CurveWindow::Last30s: return "last30s";
        case CurveWindow::Last10s: return "last10s";
    }
    return "?";
}

CurveWindow parse_curve_window(const std::string& s);

struct CurveMean {
    double value = 0.0;
    bool clamped = false; // window was longer than the curve
};

/// Arithmetic mean over the selected trailing window of the curve.
CurveMean curve_mean(const AffectCurve& curve, CurveWindow window);

/// Windowed summary statistics (mean, std, max) used when per-second curves
/// feed fixed-length classifiers.
struct CurveSummary {
    double mean = 0.0;
    double stddev = 0.0;
    double max = 0.0;
};
CurveSummary summarize_curve(const VecX& values, CurveWindow window);

} // namespace adaffect
