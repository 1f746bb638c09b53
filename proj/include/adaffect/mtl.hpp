#pragma once

#include "adaffect/types.hpp"

#include <vector>

namespace adaffect {

/// Sparse graph-regularized multi-task model: per-task linear classifiers
/// W = [w_1..w_T] coupled through the relatedness graph R (incidence
/// encoded, so |WR|_F^2 = sum over edges |w_i - w_j|^2).
struct MtlModel {
    MatX W; // d x T
    MatX R; // T x E
    double alpha = 0, beta = 0, gamma = 0;
    std::vector<double> objective_trace; // nonincreasing
    int iterations = 0;
    bool converged = false;

    Eigen::Index task_count() const { return W.cols(); }
};

/// Incidence matrix of the standard 4-quadrant task graph: tasks sharing an
/// arousal or a valence label are connected (HAHV-LAHV, HAHV-HALV,
/// LALV-LAHV, LALV-HALV). Task order follows the Quadrant enum.
MatX quadrant_incidence();

/// Incidence matrix from an explicit edge list over T tasks.
MatX incidence_from_edges(int tasks, const std::vector<std::pair<int, int>>& edges);

/// Objective: sum_t |X_t w_t - y_t|^2 + alpha |WR|_F^2 + beta |W|_1
/// + gamma |W|_F^2, with X_t holding one sample per row.
double mtl_objective(const std::vector<MatX>& X, const std::vector<VecX>& y, const MatX& W,
                     const MatX& R, double alpha, double beta, double gamma);

/// Gradient of the smooth part (everything except the l1 term).
MatX mtl_smooth_gradient(const std::vector<MatX>& X, const std::vector<VecX>& y, const MatX& W,
                         const MatX& R, double alpha, double gamma);

/// Accelerated proximal gradient (soft-thresholding for the l1 term) with
/// backtracking line search and a monotone safeguard: the recorded
/// objective never increases. Stops when the relative objective change
/// drops below tol or after max_iter iterations.
MtlModel train_mtl(const std::vector<MatX>& X, const std::vector<VecX>& y, const MatX& R,
                   double alpha, double beta, double gamma, int max_iter = 2000,
                   double tol = 1e-10);

/// sign(w_task . x); zero maps to +1 by convention.
int mtl_predict(const MtlModel& model, const VecX& x, int task);

} // namespace adaffect
