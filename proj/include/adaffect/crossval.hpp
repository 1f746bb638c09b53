#pragma once

#include "adaffect/classifiers.hpp"
#include "adaffect/curves.hpp"
#include "adaffect/dataset.hpp"
#include "adaffect/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace adaffect {

/// Classifier choice plus the hyperparameter grid searched by the inner CV.
struct ClfSpec {
    ClassifierKind kind = ClassifierKind::RbfSvm;
    double lda_shrinkage = 0.01;
    std::vector<double> c_grid = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    std::vector<double> gamma_grid = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    double svm_tol = 1e-3;
    long svm_max_iter = 500000;
};

struct CvConfig {
    int repetitions = 10;
    int folds = 5;
    int inner_folds = 5;
    CurveWindow window = CurveWindow::All;
    double frame_period_s = 3.0; // seconds covered by one frame_index step
    uint64_t seed = 0;
    int jobs = 1;
};

struct CvRun {
    int repetition = 0;
    int fold = 0;
    double accuracy = 0.0;
    double f1 = 0.0;
    double chosen_c = 0.0;     // 0 when the classifier has no such parameter
    double chosen_gamma = 0.0;
};

struct CvReport {
    std::vector<CvRun> runs; // repetitions x folds
    double accuracy_mean = 0, accuracy_std = 0;
    double f1_mean = 0, f1_std = 0;
    CurveWindow window = CurveWindow::All;
    uint64_t seed = 0;
    std::string classifier;
};

/// Repeated stratified cross-validation with folds split by ad (frames of
/// one ad never straddle train/test), an inner grid search for SVM
/// hyperparameters, and per-ad prediction by majority vote over frame
/// predictions inside the window (vote ties -> L). Reports are
/// bit-identical for a fixed seed regardless of the worker count.
CvReport cross_validate(const FeatureTable& table, const ClfSpec& clf, const CvConfig& cfg);

/// Restricts a table to the trailing window of each ad: last 30 s for
/// Last30s, the final frame for Last10s ("L"), everything for All.
FeatureTable window_table(const FeatureTable& table, CurveWindow window, double frame_period_s);

} // namespace adaffect
