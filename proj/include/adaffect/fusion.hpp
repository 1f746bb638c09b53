#pragma once

#include "adaffect/types.hpp"

#include <vector>

namespace adaffect {

/// Modality weights of the posterior-combination rule: the fused score is
/// sum_i alpha_i * t_i * p_i with t_i = alpha_i F_i / sum_j alpha_j F_j,
/// rescaled by sum_i alpha_i t_i so it stays on the posterior scale that
/// the decision threshold probes.
struct FusionWeights {
    double alpha[2] = {0.5, 0.5};   // audio, video
    double t[2] = {0.5, 0.5};
    double training_f1[2] = {0, 0};
};

struct FusionResult {
    FusionWeights weights;
    double threshold = 0.5;
    std::vector<int> labels; // +-1
    double f1 = 0.0;
};

/// Exhaustive grid search over (alpha_audio, alpha_video) in [0,1]^2 at
/// grid_step, jointly with the decision threshold over {0.30..0.70 step
/// 0.05}, maximizing F1 against `truth`. Ties prefer weights nearest
/// (0.5, 0.5), then the earliest grid point in scan order (alpha_audio,
/// alpha_video, threshold ascending). Tuning weights on the labels being
/// scored is optimistic; validation_fusion is the honest variant.
FusionResult decision_fusion(const std::vector<double>& p_audio,
                             const std::vector<double>& p_video, double f1_audio,
                             double f1_video, const std::vector<int>& truth,
                             double grid_step = 0.01);

struct ValidationFusionResult {
    std::vector<int> labels; // pooled held-out predictions
    double f1 = 0.0;         // pooled F1 of those predictions
    std::vector<FusionResult> per_fold; // weights tuned on each training split
};

/// Cross-validated fusion: weights and threshold are tuned on the training
/// folds only and applied to the held-out fold. Deterministic for a fixed
/// seed.
ValidationFusionResult validation_fusion(const std::vector<double>& p_audio,
                                         const std::vector<double>& p_video, double f1_audio,
                                         double f1_video, const std::vector<int>& truth,
                                         double grid_step = 0.01, int folds = 5,
                                         uint64_t seed = 0);

} // namespace adaffect
