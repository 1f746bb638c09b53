#include "adaffect/mtl.hpp"

#include <cmath>

namespace adaffect {

MatX incidence_from_edges(int tasks, const std::vector<std::pair<int, int>>& edges)
{
    MatX R = MatX::Zero(tasks, static_cast<Eigen::Index>(edges.size()));
    for (size_t e = 0; e < edges.size(); ++e) {
        const auto [i, j] = edges[e];
        if (i < 0 || j < 0 || i >= tasks || j >= tasks || i == j)
            throw ValidationError("incidence_from_edges: bad edge");
        R(i, static_cast<Eigen::Index>(e)) = 1.0;
        R(j, static_cast<Eigen::Index>(e)) = -1.0;
    }
    return R;
}

MatX quadrant_incidence()
{
    using Q = Quadrant;
    const auto t = [](Q q) { return static_cast<int>(q); };
    return incidence_from_edges(4, {{t(Q::HAHV), t(Q::LAHV)},   // share high valence
                                    {t(Q::HAHV), t(Q::HALV)},   // share high arousal
                                    {t(Q::LALV), t(Q::LAHV)},   // share low arousal
                                    {t(Q::LALV), t(Q::HALV)}}); // share low valence
}

namespace {

void check_shapes(const std::vector<MatX>& X, const std::vector<VecX>& y, const MatX& R)
{
    if (X.empty() || X.size() != y.size())
        throw ValidationError("mtl: task data/label count mismatch");
    if (R.rows() != static_cast<Eigen::Index>(X.size()))
        throw ValidationError("mtl: R must have one row per task");
    const Eigen::Index d = X[0].cols();
    for (size_t t = 0; t < X.size(); ++t) {
        if (X[t].cols() != d) throw ValidationError("mtl: tasks must share feature dimension");
        if (X[t].rows() != y[t].size())
            throw ValidationError("mtl: sample/label count mismatch in task " + std::to_string(t));
    }
}

double smooth_value(const std::vector<MatX>& X, const std::vector<VecX>& y, const MatX& W,
                    const MatX& RRt, double alpha, double gamma)
{
    double v = 0;
    for (size_t t = 0; t < X.size(); ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        v += (X[t] * W.col(ti) - y[t]).squaredNorm();
    }
    if (alpha > 0) v += alpha * (W * RRt).cwiseProduct(W).sum();
    v += gamma * W.squaredNorm();
    return v;
}

MatX soft_threshold(const MatX& A, double thresh)
{
    return A.unaryExpr([thresh](double v) {
        if (v > thresh) return v - thresh;
        if (v < -thresh) return v + thresh;
        return 0.0;
    });
}

} // namespace

double mtl_objective(const std::vector<MatX>& X, const std::vector<VecX>& y, const MatX& W,
                     const MatX& R, double alpha, double beta, double gamma)
{
    check_shapes(X, y, R);
    return smooth_value(X, y, W, R * R.transpose(), alpha, gamma) +
           beta * W.cwiseAbs().sum();
}

MatX mtl_smooth_gradient(const std::vector<MatX>& X, const std::vector<VecX>& y, const MatX& W,
                         const MatX& R, double alpha, double gamma)
{
    check_shapes(X, y, R);
    MatX G = 2.0 * gamma * W;
    if (alpha > 0) G += 2.0 * alpha * (W * (R * R.transpose()));
    for (size_t t = 0; t < X.size(); ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        G.col(ti) += 2.0 * X[t].transpose() * (X[t] * W.col(ti) - y[t]);
    }
    return G;
}

MtlModel train_mtl(const std::vector<MatX>& X, const std::vector<VecX>& y, const MatX& R,
                   double alpha, double beta, double gamma, int max_iter, double tol)
{
    check_shapes(X, y, R);
    if (alpha < 0 || beta < 0 || gamma < 0)
        throw ValidationError("train_mtl: regularization weights must be nonnegative");

    const Eigen::Index d = X[0].cols();
    const auto T = static_cast<Eigen::Index>(X.size());
    const MatX RRt = R * R.transpose();

    auto smooth = [&](const MatX& W) { return smooth_value(X, y, W, RRt, alpha, gamma); };
    auto full = [&](const MatX& W) { return smooth(W) + beta * W.cwiseAbs().sum(); };
    auto grad = [&](const MatX& W) {
        MatX G = 2.0 * gamma * W;
        if (alpha > 0) G += 2.0 * alpha * (W * RRt);
        for (size_t t = 0; t < X.size(); ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            G.col(ti) += 2.0 * X[t].transpose() * (X[t] * W.col(ti) - y[t]);
        }
        return G;
    };

    MtlModel model;
    model.R = R;
    model.alpha = alpha;
    model.beta = beta;
    model.gamma = gamma;

    MatX W = MatX::Zero(d, T);
    MatX Z = W;
    double theta = 1.0;
    double L = 1.0;
    double f_w = full(W);
    model.objective_trace.push_back(f_w);

    // proximal step from `from` with backtracking on L
    auto prox_step = [&](const MatX& from) {
        const MatX G = grad(from);
        const double g_from = smooth(from);
        for (;;) {
            MatX cand = soft_threshold(from - G / L, beta / L);
            const MatX diff = cand - from;
            const double quad = g_from + G.cwiseProduct(diff).sum() + 0.5 * L * diff.squaredNorm();
            if (smooth(cand) <= quad + 1e-12 * std::max(1.0, std::abs(quad))) return cand;
            L *= 2.0;
            if (L > 1e18) throw ValidationError("train_mtl: line search failed (non-finite data?)");
        }
    };

    for (int it = 0; it < max_iter; ++it) {
        MatX W_next = prox_step(Z);
        double f_next = full(W_next);
        if (f_next > f_w) {
            // accelerated step overshot: restart momentum, descend from W
            W_next = prox_step(W);
            f_next = full(W_next);
            theta = 1.0;
        }
        if (!std::isfinite(f_next))
            throw ValidationError("train_mtl: non-finite objective at iteration " +
                                  std::to_string(it) + " (L=" + std::to_string(L) + ")");

        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        Z = W_next + ((theta - 1.0) / theta_next) * (W_next - W);
        W = W_next;
        theta = theta_next;

        model.objective_trace.push_back(f_next);
        model.iterations = it + 1;
        const double rel = std::abs(f_w - f_next) / std::max(1.0, std::abs(f_w));
        f_w = f_next;
        if (rel < tol) {
            model.converged = true;
            break;
        }
    }
    model.W = std::move(W);
    return model;
}

int mtl_predict(const MtlModel& model, const VecX& x, int task)
{
    if (task < 0 || task >= model.task_count())
        throw ValidationError("mtl_predict: task index out of range");
    if (x.size() != model.W.rows())
        throw ValidationError("mtl_predict: feature dimension mismatch");
    return model.W.col(task).dot(x) >= 0 ? +1 : -1;
}

} // namespace adaffect
