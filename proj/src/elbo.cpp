#include <cmath>

#include "dynlsm/engine.hpp"

namespace dynlsm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

double gaussian_entropy(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericError("entropy of a non positive definite covariance");
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return 0.5 * (static_cast<double>(cov.rows()) * (1.0 + kLog2Pi) + logdet);
}

}  // namespace

double elbo_fixed_scale_gaussian(const VariationalState& s,
                                 const NetworkSeries& data,
                                 const ModelConfig& cfg) {
  const auto* fixed = std::get_if<FixedScales>(&cfg.scales);
  if (fixed == nullptr)
    throw ConfigError("elbo: only available with fixed scales");
  if (data.kind != LikelihoodKind::gaussian)
    throw ConfigError("elbo: only available for gaussian data");

  const Index n = s.n, T = s.T, d = s.d;
  const double dd = static_cast<double>(d);
  const double var_noise = data.noise_sd * data.noise_sd;

  // Fractional log-likelihood.
  double lik = 0.0;
  for (Index t = 0; t < T; ++t)
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        if (!data.observed(t, i, j)) continue;
        const auto& mi = s.mean[s.at(i, t)];
        const auto& mj = s.mean[s.at(j, t)];
        const auto& ci = s.cov[s.at(i, t)];
        const auto& cj = s.cov[s.at(j, t)];
        const double m = mi.dot(mj);
        const double var_s = mi.dot(cj * mi) + mj.dot(ci * mj) +
                             ci.cwiseProduct(cj.transpose()).sum();
        const double resid = data.values[t](i, j) - s.beta_mean - m;
        lik += -0.5 * (kLog2Pi + std::log(var_noise)) -
               (resid * resid + s.beta_var + var_s) / (2.0 * var_noise);
      }
  lik *= cfg.alpha;

  // Random-walk prior and chain entropies.
  const double var0 = fixed->sigma0 * fixed->sigma0;
  const double var_tau = fixed->tau * fixed->tau;
  double prior = 0.0;
  double entropy = 0.0;
  for (Index i = 0; i < n; ++i) {
    const auto k0 = s.at(i, 0);
    prior += -0.5 * dd * (kLog2Pi + std::log(var0)) -
             (s.mean[k0].squaredNorm() + s.cov[k0].trace()) / (2.0 * var0);
    for (Index t = 0; t < T; ++t) entropy += gaussian_entropy(s.cov[s.at(i, t)]);
    for (Index t = 0; t + 1 < T; ++t) {
      const auto a = s.at(i, t), b = s.at(i, t + 1);
      const auto& cross = s.cross[s.pair_at(i, t)];
      const double step = (s.mean[b] - s.mean[a]).squaredNorm() +
                          s.cov[a].trace() + s.cov[b].trace() -
                          2.0 * cross.trace();
      prior += -0.5 * dd * (kLog2Pi + std::log(var_tau)) -
               step / (2.0 * var_tau);
      Eigen::MatrixXd joint(2 * d, 2 * d);
      joint << s.cov[a], cross, cross.transpose(), s.cov[b];
      entropy += gaussian_entropy(joint) - gaussian_entropy(s.cov[a]) -
                 gaussian_entropy(s.cov[b]);
    }
  }

  // Intercept.
  const double db = s.beta_mean - cfg.beta_prior_mean;
  const double beta_prior =
      -0.5 * (kLog2Pi + std::log(cfg.beta_prior_var)) -
      (db * db + s.beta_var) / (2.0 * cfg.beta_prior_var);
  const double beta_entropy = 0.5 * (1.0 + kLog2Pi + std::log(s.beta_var));

  return lik + prior + entropy + beta_prior + beta_entropy;
}

}  // namespace dynlsm
