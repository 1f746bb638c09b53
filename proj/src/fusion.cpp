#include "adaffect/fusion.hpp"

#include "adaffect/metrics.hpp"
#include "adaffect/rng.hpp"

#include <cmath>

namespace adaffect {

FusionResult decision_fusion(const std::vector<double>& p_audio,
                             const std::vector<double>& p_video, double f1_audio,
                             double f1_video, const std::vector<int>& truth, double grid_step)
{
    if (p_audio.size() != p_video.size() || p_audio.size() != truth.size())
        throw ValidationError("decision_fusion: input lengths differ");
    if (p_audio.empty()) throw ValidationError("decision_fusion: empty inputs");
    if (f1_audio < 0 || f1_video < 0 || (f1_audio == 0 && f1_video == 0))
        throw ValidationError("decision_fusion: training F1s must be nonnegative, not both 0");
    if (grid_step <= 0 || grid_step > 1)
        throw ValidationError("decision_fusion: grid_step must be in (0,1]");

    const size_t n = truth.size();
    const int steps = static_cast<int>(std::lround(1.0 / grid_step));

    FusionResult best;
    best.f1 = -1.0;
    double best_dist = 0.0;
    std::vector<int> labels(n);

    for (int ia = 0; ia <= steps; ++ia) {
        const double a1 = static_cast<double>(ia) * grid_step;
        for (int iv = 0; iv <= steps; ++iv) {
            const double a2 = static_cast<double>(iv) * grid_step;
            const double denom = a1 * f1_audio + a2 * f1_video;
            if (denom <= 0) continue;
            const double t1 = a1 * f1_audio / denom;
            const double t2 = a2 * f1_video / denom;
            // convex combination: alpha_i t_i coefficients normalized so the
            // fused score stays on the posterior scale probed by theta
            const double norm = a1 * t1 + a2 * t2;
            const double c1 = a1 * t1 / norm, c2 = a2 * t2 / norm;
            for (int it = 0; it <= 8; ++it) {
                const double theta = 0.30 + 0.05 * it;
                for (size_t k = 0; k < n; ++k)
                    labels[k] = (c1 * p_audio[k] + c2 * p_video[k]) >= theta ? +1 : -1;
                const double f1 = f1_score(labels, truth);
                const double dist = (a1 - 0.5) * (a1 - 0.5) + (a2 - 0.5) * (a2 - 0.5);
                const bool better = f1 > best.f1 || (f1 == best.f1 && dist < best_dist);
                if (better) {
                    best.f1 = f1;
                    best_dist = dist;
                    best.threshold = theta;
                    best.labels = labels;
                    best.weights.alpha[0] = a1;
                    best.weights.alpha[1] = a2;
                    best.weights.t[0] = t1;
                    best.weights.t[1] = t2;
                }
            }
        }
    }
    best.weights.training_f1[0] = f1_audio;
    best.weights.training_f1[1] = f1_video;
    return best;
}

ValidationFusionResult validation_fusion(const std::vector<double>& p_audio,
                                         const std::vector<double>& p_video, double f1_audio,
                                         double f1_video, const std::vector<int>& truth,
                                         double grid_step, int folds, uint64_t seed)
{
    const size_t n = truth.size();
    if (folds < 2) throw ValidationError("validation_fusion: need at least 2 folds");
    if (n < static_cast<size_t>(folds))
        throw ValidationError("validation_fusion: fewer samples than folds");

    // stratified assignment so every training split sees both classes
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < n; ++i) (truth[i] > 0 ? pos : neg).push_back(i);
    Rng rng = RngStream(seed).get("fusion/fold");
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<int> fold_of(n, 0);
    for (auto* cls : {&pos, &neg})
        for (size_t k = 0; k < cls->size(); ++k)
            fold_of[(*cls)[k]] = static_cast<int>(k % static_cast<size_t>(folds));

    ValidationFusionResult res;
    res.labels.assign(n, -1);
    for (int f = 0; f < folds; ++f) {
        std::vector<double> tr_a, tr_v;
        std::vector<int> tr_y;
        std::vector<size_t> test_ix;
        for (size_t i = 0; i < n; ++i) {
            if (fold_of[i] == f) {
                test_ix.push_back(i);
            } else {
                tr_a.push_back(p_audio[i]);
                tr_v.push_back(p_video[i]);
                tr_y.push_back(truth[i]);
            }
        }
        if (tr_y.empty() || test_ix.empty()) continue;
        const FusionResult tuned =
            decision_fusion(tr_a, tr_v, f1_audio, f1_video, tr_y, grid_step);

        const double a1 = tuned.weights.alpha[0], a2 = tuned.weights.alpha[1];
        const double t1 = tuned.weights.t[0], t2 = tuned.weights.t[1];
        const double norm = a1 * t1 + a2 * t2;
        for (size_t i : test_ix) {
            const double score = (a1 * t1 * p_audio[i] + a2 * t2 * p_video[i]) / norm;
            res.labels[i] = score >= tuned.threshold ? +1 : -1;
        }
        res.per_fold.push_back(tuned);
    }
    res.f1 = f1_score(res.labels, truth);
    return res;
}

} // namespace adaffect
