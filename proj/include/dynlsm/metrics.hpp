#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dynlsm/model.hpp"

namespace dynlsm {

// Pearson correlation. Throws DataError on length mismatch, fewer than two
// points or zero variance.
double pcc(std::span<const double> xs, std::span<const double> ys);

// Mann-Whitney AUC with ties counted one half. labels are 0/1.
double auc(std::span<const double> scores, std::span<const double> labels);

// sqrt(mean over t and ordered i != j of (xhat_it'xhat_jt - x_it'x_jt)^2).
// Each trajectory is T matrices of shape n x d (d may differ).
double rmse_inner_products(const std::vector<Eigen::MatrixXd>& estimate,
                           const std::vector<Eigen::MatrixXd>& truth);

// 0-based (time, node, node).
struct EdgeRef {
  Index t;
  Index i;
  Index j;
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Plug-in predictions: beta + x_i'x_j (gaussian) or its logistic transform.
std::vector<double> predict_edges(const VariationalState& state,
                                  LikelihoodKind kind,
                                  std::span<const EdgeRef> pairs);

// All unordered pairs i < j at every time, time-major.
std::vector<EdgeRef> all_pairs(Index n, Index T);

// Fraction of entries with pred > 0.5 and label 1, over all entries.
double tp_ratio(std::span<const double> preds, std::span<const double> labels);

struct AlignedTrajectory {
  std::vector<Eigen::MatrixXd> positions;  // T matrices n x d
  std::vector<Eigen::MatrixXd> rotations;  // T matrices d x d; first is I
};

// Sequential orthogonal Procrustes: X_t is replaced by X_t R_t with R_t
// minimising ||X_t R - Xhat_{t-1}||_F over orthogonal R.
AlignedTrajectory procrustes_align(const std::vector<Eigen::MatrixXd>& traj);

// Means of q as T matrices n x d.
std::vector<Eigen::MatrixXd> trajectory(const VariationalState& state);

}  // namespace dynlsm
