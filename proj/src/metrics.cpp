#include "dynlsm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

namespace dynlsm {

double pcc(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw DataError("pcc: inputs have different lengths");
  if (xs.size() < 2) throw DataError("pcc: need at least two points");
  const double nx = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / nx;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / nx;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("pcc: zero-variance input");
  return sxy / std::sqrt(sxx * syy);
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size())
    throw DataError("auc: scores and labels have different lengths");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Sum of midranks of the positives.
  double rank_sum = 0.0;
  double positives = 0.0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi < order.size() && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double midrank = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t k = lo; k < hi; ++k)
      if (labels[order[k]] == 1.0) {
        rank_sum += midrank;
        positives += 1.0;
      }
    lo = hi;
  }
  const double negatives = static_cast<double>(scores.size()) - positives;
  if (positives == 0.0 || negatives == 0.0)
    throw DataError("auc: labels contain a single class");
  return (rank_sum - positives * (positives + 1.0) / 2.0) /
         (positives * negatives);
}

double rmse_inner_products(const std::vector<Eigen::MatrixXd>& estimate,
                           const std::vector<Eigen::MatrixXd>& truth) {
  if (estimate.size() != truth.size() || estimate.empty())
    throw DataError("rmse: trajectories have different lengths");
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (estimate[t].rows() != truth[t].rows())
      throw DataError("rmse: node counts differ");
    const Eigen::MatrixXd diff = estimate[t] * estimate[t].transpose() -
                                 truth[t] * truth[t].transpose();
    const Index n = diff.rows();
    sum += diff.squaredNorm() - diff.diagonal().squaredNorm();
    count += static_cast<double>(n * (n - 1));
  }
  return std::sqrt(sum / count);
}

std::vector<double> predict_edges(const VariationalState& state,
                                  LikelihoodKind kind,
                                  std::span<const EdgeRef> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& e : pairs) {
    if (e.t < 0 || e.t >= state.T || e.i < 0 || e.i >= state.n || e.j < 0 ||
        e.j >= state.n)
      throw DataError("predict: pair index out of range");
    const double eta = state.beta_mean + state.mean[state.at(e.i, e.t)].dot(
                                             state.mean[state.at(e.j, e.t)]);
    out.push_back(kind == LikelihoodKind::gaussian ? eta : logistic(eta));
  }
  return out;
}

std::vector<EdgeRef> all_pairs(Index n, Index T) {
  std::vector<EdgeRef> out;
  out.reserve(static_cast<std::size_t>(T * n * (n - 1) / 2));
  for (Index t = 0; t < T; ++t)
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) out.push_back({t, i, j});
  return out;
}

double tp_ratio(std::span<const double> preds, std::span<const double> labels) {
  if (preds.size() != labels.size())
    throw DataError("tp_ratio: inputs have different lengths");
  if (preds.empty()) throw DataError("tp_ratio: empty heldout set");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < preds.size(); ++k)
    if (preds[k] > 0.5 && labels[k] == 1.0) ++hits;
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

AlignedTrajectory procrustes_align(const std::vector<Eigen::MatrixXd>& traj) {
  AlignedTrajectory out;
  if (traj.empty()) throw DataError("align: empty trajectory");
  const Index d = traj.front().cols();
  out.positions.push_back(traj.front());
  out.rotations.push_back(Eigen::MatrixXd::Identity(d, d));
  for (std::size_t t = 1; t < traj.size(); ++t) {
    const Eigen::MatrixXd cross = traj[t].transpose() * out.positions.back();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd U = svd.matrixU();
    Eigen::MatrixXd V = svd.matrixV();
    // Largest-magnitude entry of each left singular vector made positive.
    for (Index k = 0; k < d; ++k) {
      Index arg;
      U.col(k).cwiseAbs().maxCoeff(&arg);
      if (U(arg, k) < 0.0) {
        U.col(k) *= -1.0;
        V.col(k) *= -1.0;
      }
    }
    Eigen::MatrixXd R = U * V.transpose();
    out.positions.push_back(traj[t] * R);
    out.rotations.push_back(std::move(R));
  }
  return out;
}

std::vector<Eigen::MatrixXd> trajectory(const VariationalState& state) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(state.T);
  for (Index t = 0; t < state.T; ++t) out.push_back(state.positions(t));
  return out;
}

}  // namespace dynlsm
