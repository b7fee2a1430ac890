#include "dynlsm/simulate.hpp"

#include <cmath>

#include "dynlsm/rng.hpp"

namespace dynlsm {

namespace {

void check_dims(Index n, Index T, Index d) {
  if (n < 2) throw ConfigError("n: must be >= 2");
  if (T < 1) throw ConfigError("T: must be >= 1");
  if (d < 1) throw ConfigError("d: must be >= 1");
}

// Fills traj[t] rows by adding correlated increments to the initial rows.
void add_increments(std::vector<Eigen::MatrixXd>& traj, double tau, double rho,
                    Philox& rng) {
  const Index T = static_cast<Index>(traj.size());
  const Index n = traj[0].rows(), d = traj[0].cols();
  const double own = tau * std::sqrt(1.0 - rho);
  const double shared = tau * std::sqrt(rho);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) {
      const double common = rng.normal();
      for (Index t = 1; t < T; ++t)
        traj[t](i, k) = traj[t - 1](i, k) + own * rng.normal() + shared * common;
    }
}

}  // namespace

SimulatedSeries simulate_binary(const BinarySimSpec& spec) {
  check_dims(spec.n, spec.T, spec.d);
  if (!(spec.rho >= 0.0 && spec.rho < 1.0))
    throw ConfigError("rho: must lie in [0, 1)");
  if (!(spec.tau >= 0.0)) throw ConfigError("tau: must be non-negative");
  const Index n = spec.n, T = spec.T, d = spec.d;
  Philox rng(spec.seed, kStreamSimulate);

  SimulatedSeries out;
  out.truth.assign(T, Eigen::MatrixXd::Zero(n, d));
  for (Index i = 0; i < n; ++i) {
    const double centre = rng.uniform() < 0.5 ? 1.5 : -1.5;
    for (Index k = 0; k < d; ++k)
      out.truth[0](i, k) = (k == 0 ? centre : 0.0) + 0.5 * rng.normal();
  }
  add_increments(out.truth, spec.tau, spec.rho, rng);

  RawSeries raw;
  raw.kind = LikelihoodKind::bernoulli;
  for (Index t = 0; t < T; ++t) {
    const Eigen::MatrixXd gram = out.truth[t] * out.truth[t].transpose();
    Eigen::MatrixXd prob = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const double p = logistic(spec.intercept + gram(i, j));
        prob(i, j) = prob(j, i) = p;
        y(i, j) = y(j, i) = rng.uniform() < p ? 1.0 : 0.0;
      }
    out.probabilities.push_back(std::move(prob));
    raw.values.push_back(std::move(y));
  }
  out.series = validate_series(raw);
  return out;
}

SimulatedSeries simulate_gaussian(const GaussianSimSpec& spec) {
  check_dims(spec.n, spec.T, spec.d);
  if (!(spec.tau >= 0.0)) throw ConfigError("tau: must be non-negative");
  if (!(spec.noise_sd > 0.0)) throw ConfigError("noise_sd: must be positive");
  const Index n = spec.n, T = spec.T, d = spec.d;
  Philox rng(spec.seed, kStreamSimulate);

  SimulatedSeries out;
  out.truth.assign(T, Eigen::MatrixXd::Zero(n, d));
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) out.truth[0](i, k) = spec.tau * rng.normal();
  add_increments(out.truth, spec.tau, 0.0, rng);

  RawSeries raw;
  raw.kind = LikelihoodKind::gaussian;
  raw.noise_sd = spec.noise_sd;
  for (Index t = 0; t < T; ++t) {
    const Eigen::MatrixXd gram = out.truth[t] * out.truth[t].transpose();
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        y(i, j) = y(j, i) =
            spec.intercept + gram(i, j) + spec.noise_sd * rng.normal();
    raw.values.push_back(std::move(y));
  }
  out.series = validate_series(raw);
  return out;
}

MaskedSeries mask_edges(const NetworkSeries& series, double p_missing,
                        std::uint64_t seed) {
  if (!(p_missing >= 0.0 && p_missing < 1.0))
    throw ConfigError("p_missing: must lie in [0, 1)");
  Philox rng(seed, kStreamMask);
  MaskedSeries out{series, {}};
  for (Index t = 0; t < series.T; ++t)
    for (Index i = 0; i < series.n; ++i)
      for (Index j = i + 1; j < series.n; ++j) {
        if (!series.observed(t, i, j)) continue;
        if (rng.uniform() < p_missing) {
          out.train.mask[t](i, j) = out.train.mask[t](j, i) = false;
          out.heldout.push_back({{t, i, j}, series.values[t](i, j)});
        }
      }
  return out;
}

NetworkSeries unmask(const NetworkSeries& train,
                     const std::vector<HeldoutEntry>& heldout) {
  NetworkSeries out = train;
  for (const auto& h : heldout) {
    const auto [t, i, j] = h.edge;
    out.mask[t](i, j) = out.mask[t](j, i) = true;
    out.values[t](i, j) = out.values[t](j, i) = h.value;
  }
  return out;
}

}  // namespace dynlsm
