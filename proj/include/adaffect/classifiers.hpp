#pragma once

#include "adaffect/types.hpp"

#include <optional>
#include <vector>

namespace adaffect {

enum class ClassifierKind { Lda, LinearSvm, RbfSvm };

inline const char* classifier_name(ClassifierKind k)
{
    switch (k) {
        case ClassifierKind::Lda: return "lda";
        case ClassifierKind::LinearSvm: return "lsvm";
        case ClassifierKind::RbfSvm: return "rsvm";
    }
    return "?";
}

inline ClassifierKind parse_classifier(const std::string& s)
{
    if (s == "lda") return ClassifierKind::Lda;
    if (s == "lsvm" || s == "linear") return ClassifierKind::LinearSvm;
    if (s == "rsvm" || s == "rbf") return ClassifierKind::RbfSvm;
    throw ParseError("invalid classifier '" + s + "'");
}

/// Sigmoid posterior p = 1/(1 + exp(a f + b)) on top of a decision score.
struct PlattCalibration {
    double a = 0.0;
    double b = 0.0;

    double probability(double f) const;
};

/// Two-class decision model. Linear models use weights/bias; the RBF SVM
/// keeps its support set.
struct ClassifierModel {
    ClassifierKind kind = ClassifierKind::Lda;
    VecX weights;       // linear decision direction (empty for rbf)
    double bias = 0.0;
    MatX support_vectors; // n_sv x d (svm only)
    VecX dual_coefs;      // alpha_i * y_i per support vector
    double C = 1.0;
    double gamma = 1.0;
    std::optional<PlattCalibration> calibration;

    double decision(const VecX& x) const;
    int predict(const VecX& x) const { return decision(x) >= 0 ? +1 : -1; }
    double probability(const VecX& x) const; // requires calibration
};

/// Pooled-covariance two-class LDA with shrinkage toward a scaled identity:
/// cov = (1-s) * pooled + s * (tr(pooled)/d) * I. The bias places the
/// boundary at the class-prior-weighted midpoint.
ClassifierModel train_lda(const MatX& X, const VecI& y, double shrinkage);

struct SvmParams {
    ClassifierKind kernel = ClassifierKind::RbfSvm; // LinearSvm or RbfSvm
    double C = 1.0;
    double gamma = 1.0; // rbf only
    double tol = 1e-3;  // KKT gap tolerance
    long max_iter = 500000;
};

struct SvmDiagnostics {
    long iterations = 0;
    double kkt_gap = 0.0;
    VecX alpha;
};

/// Soft-margin SVM trained with SMO (maximal violating pair selection).
ClassifierModel train_svm(const MatX& X, const VecI& y, const SvmParams& params,
                          SvmDiagnostics* diag = nullptr);

/// Fits the Platt sigmoid on holdout decision scores by regularized maximum
/// likelihood (Newton iterations with prior-smoothed targets).
PlattCalibration fit_platt(const std::vector<double>& scores, const std::vector<int>& labels);

/// Returns a copy of the model with calibration attached.
ClassifierModel platt_calibrate(const ClassifierModel& model, const MatX& X_holdout,
                                const VecI& y_holdout);

} // namespace adaffect
