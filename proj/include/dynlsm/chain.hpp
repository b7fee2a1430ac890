#pragma once

// Exact Gaussian belief propagation on a length-T chain whose joint density
// is proportional to
//
//   prod_t exp(-x_t' J_t x_t / 2 + h_t' x_t) * prod_t exp(c * x_t' x_{t+1}),
//
// i.e. a block-tridiagonal precision with diagonal blocks J_t and
// off-diagonal blocks -c I. Messages are kept in canonical form because they
// are generally not normalisable.

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "dynlsm/model.hpp"

namespace dynlsm {

template <typename Scalar>
struct ChainPotentials {
  std::vector<CanonicalGaussian<Scalar>> unary;
  Scalar coupling = Scalar(0);

  Index length() const { return static_cast<Index>(unary.size()); }
  Index dim() const { return unary.empty() ? 0 : unary.front().h.size(); }
};

template <typename Scalar>
struct MessageSet {
  // forward[t]: message from t into t+1. backward[t]: from t+1 into t.
  std::vector<CanonicalGaussian<Scalar>> forward;
  std::vector<CanonicalGaussian<Scalar>> backward;
};

// Joint moments of (x_t, x_{t+1}).
template <typename Scalar>
struct PairMoment {
  GaussianMoment<Scalar> joint;  // 2d-dimensional

  auto cross(Index d) const { return joint.Sigma.topRightCorner(d, d); }
};

template <typename Scalar>
struct ChainMarginals {
  std::vector<GaussianMoment<Scalar>> unary;
  std::vector<PairMoment<Scalar>> pairs;
};

namespace detail {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Eigen::LLT<Mat<Scalar>> factor_pd(const Mat<Scalar>& P, const char* what,
                                  Index time) {
  Eigen::LLT<Mat<Scalar>> llt(P);
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string(what) + ": precision not positive definite",
                       -1, time);
  return llt;
}

// Integrates x out of exp(-x'Px/2 + g'x) exp(c y'x).
template <typename Scalar>
CanonicalGaussian<Scalar> pass_through(const CanonicalGaussian<Scalar>& node,
                                       Scalar c, Index time) {
  const Index d = node.h.size();
  if (c == Scalar(0)) return CanonicalGaussian<Scalar>::zero(d);
  auto llt = factor_pd<Scalar>(node.J, "chain message", time);
  Mat<Scalar> Pinv = llt.solve(Mat<Scalar>::Identity(d, d));
  Pinv = (Pinv + Pinv.transpose()) / Scalar(2);
  return {-c * c * Pinv, c * (Pinv * node.h)};
}

template <typename Scalar>
GaussianMoment<Scalar> to_moment(const CanonicalGaussian<Scalar>& g,
                                 const char* what, Index time) {
  const Index d = g.h.size();
  auto llt = factor_pd<Scalar>(g.J, what, time);
  Mat<Scalar> Sigma = llt.solve(Mat<Scalar>::Identity(d, d));
  Sigma = (Sigma + Sigma.transpose()) / Scalar(2);
  return {Sigma * g.h, Sigma};
}

}  // namespace detail

// Backward pass t = T-1..1, then forward pass t = 1..T-1.
template <typename Scalar>
MessageSet<Scalar> compute_messages(const ChainPotentials<Scalar>& pots) {
  const Index T = pots.length();
  const Index d = pots.dim();
  MessageSet<Scalar> msgs;
  if (T <= 1) return msgs;
  msgs.forward.assign(T - 1, CanonicalGaussian<Scalar>::zero(d));
  msgs.backward.assign(T - 1, CanonicalGaussian<Scalar>::zero(d));

  for (Index t = T - 1; t >= 1; --t) {
    CanonicalGaussian<Scalar> node = pots.unary[t];
    if (t + 1 < T) node += msgs.backward[t];
    msgs.backward[t - 1] = detail::pass_through(node, pots.coupling, t);
  }
  for (Index t = 0; t + 1 < T; ++t) {
    CanonicalGaussian<Scalar> node = pots.unary[t];
    if (t > 0) node += msgs.forward[t - 1];
    msgs.forward[t] = detail::pass_through(node, pots.coupling, t);
  }
  return msgs;
}

template <typename Scalar>
std::vector<GaussianMoment<Scalar>> unary_marginals(
    const ChainPotentials<Scalar>& pots, const MessageSet<Scalar>& msgs) {
  const Index T = pots.length();
  std::vector<GaussianMoment<Scalar>> out;
  out.reserve(T);
  for (Index t = 0; t < T; ++t) {
    CanonicalGaussian<Scalar> belief = pots.unary[t];
    if (t > 0) belief += msgs.forward[t - 1];
    if (t + 1 < T) belief += msgs.backward[t];
    out.push_back(detail::to_moment(belief, "unary marginal", t));
  }
  return out;
}

template <typename Scalar>
std::vector<PairMoment<Scalar>> binary_marginals(
    const ChainPotentials<Scalar>& pots, const MessageSet<Scalar>& msgs) {
  using Mat = detail::Mat<Scalar>;
  const Index T = pots.length();
  const Index d = pots.dim();
  std::vector<PairMoment<Scalar>> out;
  if (T <= 1) return out;
  out.reserve(T - 1);
  for (Index t = 0; t + 1 < T; ++t) {
    CanonicalGaussian<Scalar> left = pots.unary[t];
    if (t > 0) left += msgs.forward[t - 1];
    CanonicalGaussian<Scalar> right = pots.unary[t + 1];
    if (t + 2 < T) right += msgs.backward[t + 1];

    CanonicalGaussian<Scalar> joint{Mat::Zero(2 * d, 2 * d),
                                    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(
                                        2 * d)};
    joint.J.topLeftCorner(d, d) = left.J;
    joint.J.bottomRightCorner(d, d) = right.J;
    joint.J.topRightCorner(d, d) = -pots.coupling * Mat::Identity(d, d);
    joint.J.bottomLeftCorner(d, d) = -pots.coupling * Mat::Identity(d, d);
    joint.h << left.h, right.h;
    out.push_back({detail::to_moment(joint, "binary marginal", t)});
  }
  return out;
}

template <typename Scalar>
ChainMarginals<Scalar> chain_marginals(const ChainPotentials<Scalar>& pots) {
  const auto msgs = compute_messages(pots);
  return {unary_marginals(pots, msgs), binary_marginals(pots, msgs)};
}

// Reference path: assembles the full Td x Td precision and inverts it.
template <typename Scalar>
ChainMarginals<Scalar> dense_chain_oracle(const ChainPotentials<Scalar>& pots) {
  using Mat = detail::Mat<Scalar>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index T = pots.length();
  const Index d = pots.dim();
  Mat P = Mat::Zero(T * d, T * d);
  Vec h(T * d);
  for (Index t = 0; t < T; ++t) {
    P.block(t * d, t * d, d, d) = pots.unary[t].J;
    h.segment(t * d, d) = pots.unary[t].h;
    if (t + 1 < T) {
      P.block(t * d, (t + 1) * d, d, d) = -pots.coupling * Mat::Identity(d, d);
      P.block((t + 1) * d, t * d, d, d) = -pots.coupling * Mat::Identity(d, d);
    }
  }
  Eigen::LLT<Mat> llt(P);
  if (llt.info() != Eigen::Success)
    throw NumericError("dense chain: precision not positive definite");
  const Mat Sigma = llt.solve(Mat::Identity(T * d, T * d));
  const Vec mu = Sigma * h;

  ChainMarginals<Scalar> out;
  for (Index t = 0; t < T; ++t)
    out.unary.push_back({mu.segment(t * d, d), Sigma.block(t * d, t * d, d, d)});
  for (Index t = 0; t + 1 < T; ++t)
    out.pairs.push_back(
        {{mu.segment(t * d, 2 * d), Sigma.block(t * d, t * d, 2 * d, 2 * d)}});
  return out;
}

}  // namespace dynlsm
