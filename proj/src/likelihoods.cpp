#include "dynlsm/likelihoods.hpp"

#include <cmath>

namespace dynlsm {

double tangent_a(double xi) {
  xi = std::abs(xi);
  return xi < 1e-4 ? -0.125 + xi * xi / 96.0 : -std::tanh(xi / 2.0) / (4.0 * xi);
}

TangentCoeffs tangent_coeffs(double xi) {
  xi = std::abs(xi);
  const double A = tangent_a(xi);
  // xi/2 - log(1 + e^xi) = -log(2 cosh(xi/2)), written to avoid overflow.
  const double log_cosh_term = -xi / 2.0 - std::log1p(std::exp(-xi));
  const double C = log_cosh_term + xi * std::tanh(xi / 2.0) / 4.0;
  return {A, C};
}

namespace {

Canonical prior_term(Index i, Index t, const VariationalState& s) {
  const double edges = (t > 0 ? 1.0 : 0.0) + (t + 1 < s.T ? 1.0 : 0.0);
  double diag = edges * s.inv_tau2(i);
  if (t == 0) diag += s.inv_sigma02(i);
  return {diag * Eigen::MatrixXd::Identity(s.d, s.d), Eigen::VectorXd::Zero(s.d)};
}

void add_gaussian_terms(Index i, Index t, const VariationalState& state,
                        const NetworkSeries& data, const NeighborIndex& nbrs,
                        const ModelConfig& cfg, Canonical& u) {
  if (!(data.noise_sd > 0.0)) throw ConfigError("noise_sd: must be positive");
  const double w = cfg.alpha / (data.noise_sd * data.noise_sd);
  for (Index j : nbrs(t, i)) {
    const auto& mu = state.mean[state.at(j, t)];
    u.J.noalias() += w * state.cov[state.at(j, t)];
    u.J.noalias() += (w * mu) * mu.transpose();
    u.h.noalias() += (w * (data.values[t](j, i) - state.beta_mean)) * mu;
  }
}

void add_bernoulli_terms(Index i, Index t, const VariationalState& state,
                         const NetworkSeries& data, const NeighborIndex& nbrs,
                         const ModelConfig& cfg, Canonical& u) {
  const double alpha = cfg.alpha;
  for (Index j : nbrs(t, i)) {
    // Symmetric matrices, read down column i.
    const double xi = state.xi[t](j, i);
    if (xi < 0.0) throw NumericError("negative tangent parameter", i, t);
    const double A = tangent_a(xi);
    const auto& mu = state.mean[state.at(j, t)];
    // A < 0, so this adds a positive semidefinite term.
    const double w = -2.0 * alpha * A;
    u.J.noalias() += w * state.cov[state.at(j, t)];
    u.J.noalias() += (w * mu) * mu.transpose();
    const double y = data.values[t](j, i);
    u.h.noalias() += (alpha * (y - 0.5 + 2.0 * A * state.beta_mean)) * mu;
  }
}

template <typename AddTerms>
ChainPotentials<double> build(Index i, const VariationalState& state,
                              AddTerms&& add) {
  ChainPotentials<double> pots;
  pots.coupling = state.T > 1 ? state.inv_tau2(i) : 0.0;
  pots.unary.reserve(state.T);
  for (Index t = 0; t < state.T; ++t) {
    Canonical u = prior_term(i, t, state);
    add(t, u);
    pots.unary.push_back(std::move(u));
  }
  return pots;
}

}  // namespace

ChainPotentials<double> potentials_gaussian(Index i,
                                            const VariationalState& state,
                                            const NetworkSeries& data,
                                            const NeighborIndex& nbrs,
                                            const ModelConfig& cfg) {
  return build(i, state, [&](Index t, Canonical& u) {
    add_gaussian_terms(i, t, state, data, nbrs, cfg, u);
  });
}

ChainPotentials<double> potentials_bernoulli(Index i,
                                             const VariationalState& state,
                                             const NetworkSeries& data,
                                             const NeighborIndex& nbrs,
                                             const ModelConfig& cfg) {
  return build(i, state, [&](Index t, Canonical& u) {
    add_bernoulli_terms(i, t, state, data, nbrs, cfg, u);
  });
}

ChainPotentials<double> node_potentials(Index i, const VariationalState& state,
                                        const NetworkSeries& data,
                                        const NeighborIndex& nbrs,
                                        const ModelConfig& cfg) {
  return data.kind == LikelihoodKind::gaussian
             ? potentials_gaussian(i, state, data, nbrs, cfg)
             : potentials_bernoulli(i, state, data, nbrs, cfg);
}

Canonical time_potential(Index i, Index t, const VariationalState& state,
                         const NetworkSeries& data, const NeighborIndex& nbrs,
                         const ModelConfig& cfg) {
  Canonical u = prior_term(i, t, state);
  if (data.kind == LikelihoodKind::gaussian)
    add_gaussian_terms(i, t, state, data, nbrs, cfg, u);
  else
    add_bernoulli_terms(i, t, state, data, nbrs, cfg, u);
  return u;
}

double expected_sq_predictor(double beta_mean, double beta_var,
                             const Eigen::VectorXd& mu_i,
                             const Eigen::MatrixXd& cov_i,
                             const Eigen::VectorXd& mu_j,
                             const Eigen::MatrixXd& cov_j) {
  const double m = mu_i.dot(mu_j);
  double quad = 0.0;
  for (Index r = 0; r < mu_i.size(); ++r)
    for (Index c = 0; c < mu_i.size(); ++c)
      quad += mu_i(r) * cov_j(r, c) * mu_i(c) + mu_j(r) * cov_i(r, c) * mu_j(c) +
              cov_i(r, c) * cov_j(c, r);
  const double second = m * m + quad;
  return beta_var + beta_mean * beta_mean + 2.0 * beta_mean * m + second;
}

namespace {

// Moments at one time gathered into contiguous columns: X.col(i) = mu_it,
// C.col(i) = vec(Sigma_it).
struct TimeSlice {
  Eigen::MatrixXd X;
  Eigen::MatrixXd C;
};

TimeSlice gather(const VariationalState& s, Index t, bool with_cov) {
  TimeSlice slice{Eigen::MatrixXd(s.d, s.n), Eigen::MatrixXd()};
  if (with_cov) slice.C.resize(s.d * s.d, s.n);
  for (Index i = 0; i < s.n; ++i) {
    slice.X.col(i) = s.mean[s.at(i, t)];
    if (with_cov)
      slice.C.col(i) = s.cov[s.at(i, t)].reshaped();
  }
  return slice;
}

}  // namespace

void update_xi(VariationalState& state, const NeighborIndex& nbrs) {
  const Index d = state.d;
  for (Index t = 0; t < state.T; ++t) {
    const TimeSlice sl = gather(state, t, true);
    auto& xi = state.xi[t];
    for (Index i = 0; i < state.n; ++i) {
      const auto mi = sl.X.col(i);
      const Eigen::Map<const Eigen::MatrixXd> Si(sl.C.col(i).data(), d, d);
      for (Index j : nbrs(t, i)) {
        if (j < i) continue;
        const auto mj = sl.X.col(j);
        const Eigen::Map<const Eigen::MatrixXd> Sj(sl.C.col(j).data(), d, d);
        const double m = mi.dot(mj);
        double quad = 0.0;
        for (Index r = 0; r < d; ++r)
          for (Index c = 0; c < d; ++c)
            quad += mi(r) * Sj(r, c) * mi(c) +
                    mj(r) * Si(r, c) * mj(c) + Si(r, c) * Sj(c, r);
        const double r2 = state.beta_var +
                          state.beta_mean * (state.beta_mean + 2.0 * m) +
                          m * m + quad;
        if (!(r2 >= 0.0))
          throw NumericError("negative second moment in tangent update", i, t);
        xi(i, j) = xi(j, i) = std::sqrt(r2);
      }
    }
  }
}

BetaPosterior update_beta(const VariationalState& state,
                          const NetworkSeries& data, const NeighborIndex& nbrs,
                          const ModelConfig& cfg) {
  const double alpha = cfg.alpha;
  const double prior_prec = 1.0 / cfg.beta_prior_var;
  double prec = prior_prec;
  double shift = prior_prec * cfg.beta_prior_mean;
  const bool gaussian = data.kind == LikelihoodKind::gaussian;
  const double w = gaussian ? alpha / (data.noise_sd * data.noise_sd) : alpha;
  for (Index t = 0; t < state.T; ++t) {
    const Eigen::MatrixXd X = gather(state, t, false).X;
    for (Index i = 0; i < state.n; ++i)
      for (Index j : nbrs(t, i)) {
        if (j < i) continue;
        const double m = X.col(i).dot(X.col(j));
        const double y = data.values[t](j, i);
        if (gaussian) {
          prec += w;
          shift += w * (y - m);
        } else {
          const double A = tangent_a(state.xi[t](j, i));
          prec -= 2.0 * w * A;
          shift += w * (y - 0.5 + 2.0 * A * m);
        }
      }
  }
  if (!(prec > 0.0)) throw NumericError("intercept posterior variance <= 0");
  return {shift / prec, 1.0 / prec};
}

}  // namespace dynlsm
