#include "adaffect/classifiers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace adaffect {

double PlattCalibration::probability(double f) const
{
    const double t = a * f + b;
    // numerically safe logistic
    if (t >= 0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

double ClassifierModel::decision(const VecX& x) const
{
    if (kind == ClassifierKind::RbfSvm) {
        if (x.size() != support_vectors.cols())
            throw ValidationError("decision: feature dimension mismatch");
        double u = 0;
        for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
            const double d2 = (support_vectors.row(i).transpose() - x).squaredNorm();
            u += dual_coefs[i] * std::exp(-gamma * d2);
        }
        return u + bias;
    }
    if (x.size() != weights.size())
        throw ValidationError("decision: feature dimension mismatch");
    return weights.dot(x) + bias;
}

double ClassifierModel::probability(const VecX& x) const
{
    if (!calibration) throw ValidationError("probability: model is not calibrated");
    return calibration->probability(decision(x));
}

ClassifierModel train_lda(const MatX& X, const VecI& y, double shrinkage)
{
    const Eigen::Index n = X.rows(), d = X.cols();
    if (n < 2) throw ValidationError("train_lda: need at least 2 samples");
    if (shrinkage < 0 || shrinkage > 1)
        throw ValidationError("train_lda: shrinkage must be in [0,1]");

    Eigen::Index n_pos = 0, n_neg = 0;
    for (Eigen::Index i = 0; i < n; ++i) (y[i] > 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw ValidationError("train_lda: one class absent");

    VecX mu_pos = VecX::Zero(d), mu_neg = VecX::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i)
        (y[i] > 0 ? mu_pos : mu_neg) += X.row(i).transpose();
    mu_pos /= static_cast<double>(n_pos);
    mu_neg /= static_cast<double>(n_neg);

    MatX cov = MatX::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const VecX c = X.row(i).transpose() - (y[i] > 0 ? mu_pos : mu_neg);
        cov += c * c.transpose();
    }
    const double dof = static_cast<double>(n - 2);
    if (dof > 0) cov /= dof;

    double target = cov.trace() / static_cast<double>(d);
    if (target <= 0) target = 1.0; // zero-variance data: fall back to identity scale
    MatX shrunk = (1.0 - shrinkage) * cov +
                  shrinkage * target * MatX::Identity(d, d);

    const VecX diff = mu_pos - mu_neg;
    Eigen::LDLT<MatX> ldlt(shrunk);
    VecX w = ldlt.solve(diff);
    const double residual = (shrunk * w - diff).norm();
    if (!w.allFinite() || residual > 1e-8 * std::max(1.0, diff.norm()))
        throw ValidationError(
            "train_lda: singular pooled covariance; increase shrinkage above 0");

    ClassifierModel m;
    m.kind = ClassifierKind::Lda;
    m.weights = w;
    m.bias = -0.5 * w.dot(mu_pos + mu_neg) +
             std::log(static_cast<double>(n_pos) / static_cast<double>(n_neg));
    return m;
}

namespace {

MatX kernel_matrix(const MatX& X, const SvmParams& p)
{
    if (p.kernel == ClassifierKind::LinearSvm) return X * X.transpose();
    const VecX sq = X.rowwise().squaredNorm();
    MatX K = -2.0 * (X * X.transpose());
    K.colwise() += sq;
    K.rowwise() += sq.transpose();
    return (-p.gamma * K.array()).exp();
}

} // namespace

ClassifierModel train_svm(const MatX& X, const VecI& y, const SvmParams& params,
                          SvmDiagnostics* diag)
{
    const Eigen::Index n = X.rows();
    if (n < 2) throw ValidationError("train_svm: need at least 2 samples");
    if (params.C <= 0) throw ValidationError("train_svm: C must be positive");
    if (params.kernel == ClassifierKind::RbfSvm && params.gamma <= 0)
        throw ValidationError("train_svm: gamma must be positive");
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < n; ++i) (y[i] > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw ValidationError("train_svm: one class absent");

    const MatX K = kernel_matrix(X, params);
    const double C = params.C;
    VecX alpha = VecX::Zero(n);
    VecX grad = VecX::Constant(n, -1.0); // gradient of 1/2 a'Qa - e'a

    // alphas within rounding distance of a box bound count as bound-bound;
    // otherwise the selected pair can have a zero-width feasible box and the
    // loop stalls on it
    const double bound_eps = 1e-12 * std::max(1.0, C);
    auto in_up = [&](Eigen::Index t) {
        return (y[t] > 0 && alpha[t] < C - bound_eps) || (y[t] < 0 && alpha[t] > bound_eps);
    };
    auto in_low = [&](Eigen::Index t) {
        return (y[t] < 0 && alpha[t] < C - bound_eps) || (y[t] > 0 && alpha[t] > bound_eps);
    };

    long iter = 0;
    double gap = 0;
    for (;; ++iter) {
        if (iter > 0 && iter % 2000 == 0) {
            // rebuild the gradient to cancel incremental rounding drift
            for (Eigen::Index t = 0; t < n; ++t) {
                double acc = -1.0;
                for (Eigen::Index s = 0; s < n; ++s)
                    acc += static_cast<double>(y[t]) * y[s] * K(t, s) * alpha[s];
                grad[t] = acc;
            }
        }

        // first index: maximal violation; second: best second-order gain
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double v = -static_cast<double>(y[t]) * grad[t];
            if (in_up(t) && v > m_up) {
                m_up = v;
                i = t;
            }
            if (in_low(t) && v < m_low) m_low = v;
        }
        gap = m_up - m_low;
        if (gap <= params.tol) break;
        if (iter >= params.max_iter)
            throw ValidationError("train_svm: no convergence after " + std::to_string(iter) +
                                  " iterations (KKT gap " + std::to_string(gap) + ")");

        Eigen::Index j = -1;
        double best_gain = 0;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double vt = -static_cast<double>(y[t]) * grad[t];
            const double b_t = m_up - vt;
            if (b_t <= 0) continue;
            const double a_t = std::max(K(i, i) + K(t, t) - 2.0 * K(i, t), 1e-12);
            const double gain = b_t * b_t / a_t;
            if (gain > best_gain) {
                best_gain = gain;
                j = t;
            }
        }
        if (j < 0) break; // no violating partner: optimal within tolerance

        const double yi = y[i], yj = y[j];
        const double Ei = yi * grad[i]; // u_i - y_i
        const double Ej = yj * grad[j];
        double L, H;
        if (yi != yj) {
            L = std::max(0.0, alpha[j] - alpha[i]);
            H = std::min(C, C + alpha[j] - alpha[i]);
        } else {
            L = std::max(0.0, alpha[i] + alpha[j] - C);
            H = std::min(C, alpha[i] + alpha[j]);
        }
        const double eta = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), 1e-12);
        double aj = alpha[j] + yj * (Ei - Ej) / eta;
        aj = std::clamp(aj, L, H);
        const double ai = alpha[i] + yi * yj * (alpha[j] - aj);

        const double dai = ai - alpha[i], daj = aj - alpha[j];
        for (Eigen::Index t = 0; t < n; ++t)
            grad[t] += static_cast<double>(y[t]) *
                       (yi * K(t, i) * dai + yj * K(t, j) * daj);
        alpha[i] = ai;
        alpha[j] = aj;
    }

    // b from the midpoint of the optimality interval
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
        const double v = -static_cast<double>(y[t]) * grad[t];
        if (in_up(t)) m_up = std::max(m_up, v);
        if (in_low(t)) m_low = std::min(m_low, v);
    }
    const double b = (m_up + m_low) / 2.0;

    ClassifierModel model;
    model.kind = params.kernel;
    model.C = params.C;
    model.gamma = params.gamma;
    model.bias = b;

    std::vector<Eigen::Index> sv;
    for (Eigen::Index t = 0; t < n; ++t)
        if (alpha[t] > 1e-12) sv.push_back(t);
    model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
    model.dual_coefs.resize(static_cast<Eigen::Index>(sv.size()));
    for (size_t k = 0; k < sv.size(); ++k) {
        model.support_vectors.row(static_cast<Eigen::Index>(k)) = X.row(sv[k]);
        model.dual_coefs[static_cast<Eigen::Index>(k)] = alpha[sv[k]] * y[sv[k]];
    }
    if (params.kernel == ClassifierKind::LinearSvm) {
        model.weights = VecX::Zero(X.cols());
        for (size_t k = 0; k < sv.size(); ++k)
            model.weights += model.dual_coefs[static_cast<Eigen::Index>(k)] *
                             X.row(sv[k]).transpose();
    }

    if (diag) {
        diag->iterations = iter;
        diag->kkt_gap = gap;
        diag->alpha = alpha;
    }
    return model;
}

PlattCalibration fit_platt(const std::vector<double>& scores, const std::vector<int>& labels)
{
    if (scores.size() != labels.size())
        throw ValidationError("fit_platt: scores/labels length mismatch");
    const size_t n = scores.size();
    double prior1 = 0, prior0 = 0;
    for (int l : labels) (l > 0 ? prior1 : prior0) += 1;
    if (prior1 == 0 || prior0 == 0)
        throw ValidationError("fit_platt: holdout must contain both classes");

    // prior-smoothed targets; Newton with backtracking on the cross-entropy
    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    std::vector<double> target(n);
    for (size_t i = 0; i < n; ++i) target[i] = labels[i] > 0 ? hi : lo;

    double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));

    auto objective = [&](double A, double B) {
        double f = 0;
        for (size_t i = 0; i < n; ++i) {
            const double z = A * scores[i] + B;
            // -[t log p + (1-t) log(1-p)], p = 1/(1+e^z), stable form
            if (z >= 0)
                f += target[i] * z + std::log1p(std::exp(-z));
            else
                f += (target[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return f;
    };

    constexpr double min_step = 1e-10, sigma = 1e-12;
    double fval = objective(a, b);
    for (int it = 0; it < 200; ++it) {
        double h11 = sigma, h22 = sigma, h21 = 0, g1 = 0, g2 = 0;
        for (size_t i = 0; i < n; ++i) {
            const double z = a * scores[i] + b;
            double p, q;
            if (z >= 0) {
                const double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                const double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            const double d2 = p * q;
            h11 += scores[i] * scores[i] * d2;
            h22 += d2;
            h21 += scores[i] * d2;
            const double d1 = target[i] - p;
            g1 += scores[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-10 && std::abs(g2) < 1e-10) break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        while (step >= min_step) {
            const double fnew = objective(a + step * da, b + step * db);
            if (fnew < fval + 1e-4 * step * gd) {
                a += step * da;
                b += step * db;
                fval = fnew;
                break;
            }
            step /= 2.0;
        }
        if (step < min_step) break;
    }
    return PlattCalibration{a, b};
}

ClassifierModel platt_calibrate(const ClassifierModel& model, const MatX& X_holdout,
                                const VecI& y_holdout)
{
    if (X_holdout.rows() != y_holdout.size())
        throw ValidationError("platt_calibrate: X/y size mismatch");
    std::vector<double> scores(static_cast<size_t>(X_holdout.rows()));
    std::vector<int> labels(static_cast<size_t>(X_holdout.rows()));
    for (Eigen::Index i = 0; i < X_holdout.rows(); ++i) {
        scores[static_cast<size_t>(i)] = model.decision(X_holdout.row(i).transpose());
        labels[static_cast<size_t>(i)] = y_holdout[i];
    }
    ClassifierModel out = model;
    out.calibration = fit_platt(scores, labels);
    return out;
}

} // namespace adaffect
