#include "adaffect/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace adaffect {

namespace {

double bessel_i0(double x)
{
    // power series; converges quickly for the beta range used here
    double sum = 1.0, term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

// Linear interpolation of scatter points (ts, vs) onto the 1 Hz grid
// t = 0..n-1, holding the terminal values outside [ts.front(), ts.back()].
VecX resample_1hz(const std::vector<double>& ts, const std::vector<double>& vs, int n_seconds)
{
    VecX out = VecX::Zero(n_seconds);
    if (ts.empty()) return out;
    for (int s = 0; s < n_seconds; ++s) {
        const double t = static_cast<double>(s);
        if (t <= ts.front()) {
            out[s] = vs.front();
        } else if (t >= ts.back()) {
            out[s] = vs.back();
        } else {
            const auto hi = std::upper_bound(ts.begin(), ts.end(), t);
            const size_t j = static_cast<size_t>(hi - ts.begin());
            const double t0 = ts[j - 1], t1 = ts[j];
            const double a = (t - t0) / (t1 - t0);
            out[s] = (1 - a) * vs[j - 1] + a * vs[j];
        }
    }
    return out;
}

double mean_abs_luma_diff(const Frame& a, const Frame& b)
{
    double acc = 0;
    const size_t n = a.pixel_count();
    for (size_t p = 0; p < n; ++p) {
        const auto luma = [](const Frame& f, size_t i) {
            return (0.299 * f.rgb[3 * i] + 0.587 * f.rgb[3 * i + 1] + 0.114 * f.rgb[3 * i + 2]) /
                   255.0;
        };
        acc += std::abs(luma(a, p) - luma(b, p));
    }
    return acc / static_cast<double>(n);
}

int seconds_for(const FrameSequence& frames, int n_seconds)
{
    if (n_seconds > 0) return n_seconds;
    const double last = frames.timestamps_s.empty() ? 0.0 : frames.timestamps_s.back();
    return std::max(1, static_cast<int>(std::ceil(last)) + (last == std::floor(last) ? 1 : 0));
}

std::pair<std::vector<double>, std::vector<double>>
frame_diff_series(const FrameSequence& frames)
{
    std::vector<double> ts, ds;
    for (size_t i = 1; i < frames.size(); ++i) {
        ts.push_back(frames.timestamps_s[i]);
        ds.push_back(mean_abs_luma_diff(frames.frames[i - 1], frames.frames[i]));
    }
    return {ts, ds};
}

} // namespace

VecX minmax_normalize(const VecX& v)
{
    if (v.size() == 0) return v;
    const double lo = v.minCoeff(), hi = v.maxCoeff();
    // ranges at rounding-noise level count as constant
    const double span = hi - lo;
    if (span <= 1e-12 * std::max({1.0, std::abs(hi), std::abs(lo)}))
        return VecX::Zero(v.size());
    return (v.array() - lo) / span;
}

VecX smoother_window(const SmootherConfig& cfg)
{
    const int len = std::max(1, cfg.length_s | 1); // force odd
    VecX w(len);
    if (cfg.kind == SmootherKind::Triangular) {
        const double mid = (len - 1) / 2.0;
        for (int i = 0; i < len; ++i) w[i] = 1.0 - std::abs(i - mid) / (mid + 1.0);
    } else {
        const double denom = bessel_i0(cfg.kaiser_beta);
        const double half = (len - 1) / 2.0;
        for (int i = 0; i < len; ++i) {
            const double r = half == 0 ? 0.0 : (i - half) / half;
            w[i] = bessel_i0(cfg.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
        }
    }
    return w / w.sum();
}

VecX smooth_curve(const VecX& v, const VecX& taps)
{
    const Eigen::Index n = v.size(), m = taps.size();
    const Eigen::Index half = m / 2;
    VecX out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0, wsum = 0;
        for (Eigen::Index k = 0; k < m; ++k) {
            const Eigen::Index j = i + k - half;
            if (j < 0 || j >= n) continue;
            acc += taps[k] * v[j];
            wsum += taps[k];
        }
        out[i] = wsum > 0 ? acc / wsum : 0.0;
    }
    return out;
}

VecX audio_energy_curve(const AudioClip& clip)
{
    if (clip.samples.size() == 0) throw ValidationError("audio_energy_curve: empty clip");
    const int fs = clip.sample_rate_hz;
    const int n_sec = static_cast<int>(std::ceil(clip.duration_s()));
    VecX e = VecX::Zero(n_sec);
    for (int s = 0; s < n_sec; ++s) {
        const Eigen::Index b = static_cast<Eigen::Index>(s) * fs;
        const Eigen::Index len = std::min<Eigen::Index>(fs, clip.samples.size() - b);
        if (len > 0) e[s] = clip.samples.segment(b, len).squaredNorm() / static_cast<double>(len);
    }
    return minmax_normalize(e);
}

VecX pitch_curve(const AudioClip& clip, double voicing_threshold)
{
    const int fs = clip.sample_rate_hz;
    if (fs < 8000) throw ValidationError("pitch_curve: sample rate must be >= 8 kHz");
    const auto wlen = static_cast<Eigen::Index>(std::lround(0.040 * fs));
    const auto hop = static_cast<Eigen::Index>(std::lround(0.020 * fs));
    const int n_sec = static_cast<int>(std::ceil(clip.duration_s()));

    const auto lag_min = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(fs / 500));
    const auto lag_max = std::min<Eigen::Index>(wlen - 1, static_cast<Eigen::Index>(fs / 50));

    std::vector<std::vector<double>> voiced(static_cast<size_t>(n_sec));
    for (Eigen::Index start = 0; start + wlen <= clip.samples.size(); start += hop) {
        VecX x = clip.samples.segment(start, wlen);
        x.array() -= x.mean();

        VecX sq_prefix(wlen + 1);
        sq_prefix[0] = 0;
        for (Eigen::Index i = 0; i < wlen; ++i) sq_prefix[i + 1] = sq_prefix[i] + x[i] * x[i];

        double best_r = -1;
        Eigen::Index best_lag = 0;
        VecX rs = VecX::Zero(lag_max + 2);
        for (Eigen::Index lag = lag_min; lag <= lag_max; ++lag) {
            const Eigen::Index len = wlen - lag;
            const double num = x.head(len).dot(x.tail(len));
            const double d0 = sq_prefix[len];                    // sum x[0..len)
            const double d1 = sq_prefix[wlen] - sq_prefix[lag];  // sum x[lag..wlen)
            const double denom = std::sqrt(d0 * d1);
            const double r = denom > 0 ? num / denom : 0.0;
            rs[lag] = r;
            if (r > best_r) {
                best_r = r;
                best_lag = lag;
            }
        }
        if (best_lag == 0 || best_r < voicing_threshold) continue;
        // a periodic signal peaks at every period multiple; take the first
        // local peak comparable to the global one so the octave stays right
        for (Eigen::Index lag = lag_min + 1; lag < best_lag; ++lag) {
            if (rs[lag] >= 0.9 * best_r && rs[lag] >= rs[lag - 1] && rs[lag] >= rs[lag + 1]) {
                best_lag = lag;
                break;
            }
        }

        double lag_refined = static_cast<double>(best_lag);
        if (best_lag > lag_min && best_lag < lag_max) {
            const double rm = rs[best_lag - 1], r0 = rs[best_lag], rp = rs[best_lag + 1];
            const double den = rm - 2 * r0 + rp;
            if (std::abs(den) > 1e-12) {
                const double delta = 0.5 * (rm - rp) / den;
                if (std::abs(delta) <= 1.0) lag_refined += delta;
            }
        }
        const double pitch = std::clamp(static_cast<double>(fs) / lag_refined, 50.0, 500.0);
        const auto center_sec =
            static_cast<size_t>((start + wlen / 2) / static_cast<Eigen::Index>(fs));
        if (center_sec < voiced.size()) voiced[center_sec].push_back(pitch);
    }

    VecX out = VecX::Zero(n_sec);
    for (int s = 0; s < n_sec; ++s) {
        auto& v = voiced[static_cast<size_t>(s)];
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const size_t k = v.size();
        out[s] = (k % 2 == 1) ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
    }
    return out;
}

VecX motion_activity_curve(const FrameSequence& frames, int n_seconds)
{
    const int n_sec = seconds_for(frames, n_seconds);
    if (frames.size() < 2) return VecX::Zero(n_sec);
    const auto [ts, ds] = frame_diff_series(frames);
    return resample_1hz(ts, ds, n_sec);
}

std::vector<size_t> shot_boundaries(const FrameSequence& frames, double threshold_k)
{
    std::vector<size_t> out;
    if (frames.size() < 2) return out;
    const auto [ts, ds] = frame_diff_series(frames);
    const double n = static_cast<double>(ds.size());
    const double mean = std::accumulate(ds.begin(), ds.end(), 0.0) / n;
    double var = 0;
    for (double d : ds) var += (d - mean) * (d - mean);
    const double sd = std::sqrt(var / n);
    for (size_t i = 0; i < ds.size(); ++i) {
        if (ds[i] > 0 && ds[i] >= mean + threshold_k * sd) out.push_back(i + 1);
    }
    return out;
}

VecX shot_change_curve(const FrameSequence& frames, int n_seconds, double threshold_k)
{
    const int n_sec = seconds_for(frames, n_seconds);
    VecX counts = VecX::Zero(n_sec);
    if (frames.size() >= 2) {
        const auto cuts = shot_boundaries(frames, threshold_k);
        for (int s = 0; s < n_sec; ++s) {
            const double lo = s - 5.0, hi = s + 5.0; // centered 10 s window
            for (size_t c : cuts) {
                const double t = frames.timestamps_s[c];
                if (t >= lo && t < hi) counts[s] += 1;
            }
        }
    }
    return minmax_normalize(counts);
}

VecX color_score_curve(const FrameSequence& frames, int n_seconds)
{
    const int n_sec = seconds_for(frames, n_seconds);
    std::vector<double> ts, vs;
    for (size_t i = 0; i < frames.size(); ++i) {
        const Frame& f = frames.frames[i];
        double acc = 0;
        for (size_t p = 0; p < f.pixel_count(); ++p) {
            const uint8_t r = f.rgb[3 * p], g = f.rgb[3 * p + 1], b = f.rgb[3 * p + 2];
            const uint8_t mx = std::max({r, g, b}), mn = std::min({r, g, b});
            acc += static_cast<double>(mx - mn) / 255.0; // HSV value x saturation
        }
        ts.push_back(frames.timestamps_s[i]);
        vs.push_back(acc / static_cast<double>(f.pixel_count()));
    }
    return minmax_normalize(resample_1hz(ts, vs, n_sec));
}

namespace {

AffectCurve assemble(Dimension dim, const std::vector<std::pair<std::string, VecX>>& comps,
                     const std::vector<double>& weights, const HanjalicConfig& cfg)
{
    double wsum = 0;
    for (double w : weights) {
        if (w < 0) throw ValidationError("hanjalic curve: negative component weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ValidationError("hanjalic curve: component weights must sum to 1");
    const Eigen::Index n = comps.front().second.size();
    for (const auto& [name, c] : comps) {
        if (c.size() != n)
            throw ValidationError("hanjalic curve: component '" + name + "' length " +
                                  std::to_string(c.size()) + " != " + std::to_string(n));
    }
    VecX acc = VecX::Zero(n);
    for (size_t i = 0; i < comps.size(); ++i) acc += weights[i] * comps[i].second;
    if (cfg.smoother.enabled && n > 1) acc = smooth_curve(acc, smoother_window(cfg.smoother));
    if (cfg.normalize) acc = minmax_normalize(acc);

    AffectCurve out;
    out.values = std::move(acc);
    out.dimension = dim;
    for (size_t i = 0; i < comps.size(); ++i) {
        out.components[comps[i].first] = comps[i].second;
        out.weights[comps[i].first] = weights[i];
    }
    return out;
}

} // namespace

AffectCurve hanjalic_arousal(const VecX& motion, const VecX& shot_rate, const VecX& energy,
                             const HanjalicConfig& cfg)
{
    return assemble(Dimension::Arousal,
                    {{"motion", motion}, {"shot_rate", shot_rate}, {"energy", energy}},
                    {cfg.arousal_weights[0], cfg.arousal_weights[1], cfg.arousal_weights[2]}, cfg);
}

AffectCurve hanjalic_valence(const VecX& pitch_hz, const VecX& color, const HanjalicConfig& cfg)
{
    // deviation from the median voiced pitch; unvoiced seconds contribute 0
    std::vector<double> voiced;
    for (Eigen::Index i = 0; i < pitch_hz.size(); ++i)
        if (pitch_hz[i] > 0) voiced.push_back(pitch_hz[i]);
    VecX dev = VecX::Zero(pitch_hz.size());
    if (!voiced.empty()) {
        std::sort(voiced.begin(), voiced.end());
        const size_t k = voiced.size();
        const double med =
            (k % 2 == 1) ? voiced[k / 2] : 0.5 * (voiced[k / 2 - 1] + voiced[k / 2]);
        for (Eigen::Index i = 0; i < pitch_hz.size(); ++i)
            if (pitch_hz[i] > 0) dev[i] = pitch_hz[i] - med;
    }
    return assemble(Dimension::Valence, {{"pitch", minmax_normalize(dev)}, {"color", color}},
                    {cfg.valence_weights[0], cfg.valence_weights[1]}, cfg);
}

HanjalicCurves hanjalic_pipeline(const AudioClip& clip, const FrameSequence& frames,
                                 const HanjalicConfig& cfg)
{
    const int n_sec = static_cast<int>(std::ceil(clip.duration_s()));
    HanjalicCurves out;
    out.arousal = hanjalic_arousal(motion_activity_curve(frames, n_sec),
                                   shot_change_curve(frames, n_sec, cfg.shot_threshold_k),
                                   audio_energy_curve(clip), cfg);
    out.valence = hanjalic_valence(pitch_curve(clip, cfg.voicing_threshold),
                                   color_score_curve(frames, n_sec), cfg);
    return out;
}

CurveWindow parse_curve_window(const std::string& s)
{
    if (s == "all") return CurveWindow::All;
    if (s == "last30s" || s == "l3") return CurveWindow::Last30s;
    if (s == "last10s" || s == "l") return CurveWindow::Last10s;
    throw ParseError("invalid curve window '" + s + "'");
}

CurveMean curve_mean(const AffectCurve& curve, CurveWindow window)
{
    const Eigen::Index n = curve.values.size();
    if (n == 0) throw ValidationError("curve_mean: empty curve");
    Eigen::Index want = n;
    if (window == CurveWindow::Last30s) want = 30;
    if (window == CurveWindow::Last10s) want = 10;
    CurveMean cm;
    cm.clamped = want > n;
    const Eigen::Index take = std::min(want, n);
    cm.value = curve.values.tail(take).mean();
    return cm;
}

CurveSummary summarize_curve(const VecX& values, CurveWindow window)
{
    const Eigen::Index n = values.size();
    if (n == 0) throw ValidationError("summarize_curve: empty curve");
    Eigen::Index want = n;
    if (window == CurveWindow::Last30s) want = 30;
    if (window == CurveWindow::Last10s) want = 10;
    const Eigen::Index take = std::min(want, n);
    const VecX w = values.tail(take);
    CurveSummary s;
    s.mean = w.mean();
    s.stddev = std::sqrt((w.array() - s.mean).square().sum() / static_cast<double>(take));
    s.max = w.maxCoeff();
    return s;
}

} // namespace adaffect
