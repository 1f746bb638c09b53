#pragma once

#include "adaffect/types.hpp"

#include <vector>

namespace adaffect {

/// F1 of the positive class: 2PR/(P+R), 0 when precision+recall is 0.
inline double f1_score(const std::vector<int>& pred, const std::vector<int>& truth)
{
    if (pred.size() != truth.size())
        throw ValidationError("f1_score: prediction/truth length mismatch");
    double tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] > 0 && truth[i] > 0) tp += 1;
        else if (pred[i] > 0 && truth[i] <= 0) fp += 1;
        else if (pred[i] <= 0 && truth[i] > 0) fn += 1;
    }
    if (tp + fp == 0 || tp + fn == 0) return 0.0;
    const double precision = tp / (tp + fp);
    const double recall = tp / (tp + fn);
    if (precision + recall == 0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth)
{
    if (pred.size() != truth.size())
        throw ValidationError("accuracy: prediction/truth length mismatch");
    if (pred.empty()) throw ValidationError("accuracy: empty inputs");
    double ok = 0;
    for (size_t i = 0; i < pred.size(); ++i)
        if ((pred[i] > 0) == (truth[i] > 0)) ok += 1;
    return ok / static_cast<double>(pred.size());
}

} // namespace adaffect
