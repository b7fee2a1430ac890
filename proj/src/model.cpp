#include "dynlsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynlsm/rng.hpp"

namespace dynlsm {

namespace {

std::string numeric_message(const std::string& what, Index node, Index time) {
  std::ostringstream os;
  os << what;
  if (node >= 0) os << " (node " << node + 1;
  if (time >= 0) os << (node >= 0 ? ", " : " (") << "time " << time + 1;
  if (node >= 0 || time >= 0) os << ")";
  return os.str();
}

}  // namespace

NumericError::NumericError(const std::string& what, Index node, Index time)
    : std::runtime_error(numeric_message(what, node, time)),
      node_(node),
      time_(time) {}

std::string to_string(LikelihoodKind kind) {
  return kind == LikelihoodKind::gaussian ? "gaussian" : "bernoulli";
}

LikelihoodKind parse_kind(const std::string& s) {
  if (s == "gaussian") return LikelihoodKind::gaussian;
  if (s == "bernoulli") return LikelihoodKind::bernoulli;
  throw ConfigError("kind: expected gaussian or bernoulli, got '" + s + "'");
}

std::string to_string(Family f) { return f == Family::smf ? "smf" : "mf"; }

Family parse_family(const std::string& s) {
  if (s == "smf") return Family::smf;
  if (s == "mf") return Family::mf;
  throw ConfigError("family: expected smf or mf, got '" + s + "'");
}

std::string scale_mode_name(const ScaleMode& mode) {
  switch (mode.index()) {
    case 0: return "fixed";
    case 1: return "adaptive_global";
    default: return "adaptive_nodewise";
  }
}

Index NetworkSeries::observed_count() const {
  Index count = 0;
  for (Index t = 0; t < T; ++t)
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) count += mask[t](i, j) ? 1 : 0;
  return count;
}

NetworkSeries validate_series(const RawSeries& raw) {
  const Index T = static_cast<Index>(raw.values.size());
  if (T < 1) throw DataError("series: need at least one time point");
  const Index n = raw.values[0].rows();
  if (n < 2) throw DataError("series: need at least two nodes");
  if (!raw.mask.empty() && static_cast<Index>(raw.mask.size()) != T)
    throw DataError("series: mask has wrong number of time points");
  if (raw.kind == LikelihoodKind::gaussian &&
      !(raw.noise_sd > 0.0 && std::isfinite(raw.noise_sd)))
    throw DataError("series: noise_sd must be positive");

  NetworkSeries out;
  out.kind = raw.kind;
  out.n = n;
  out.T = T;
  out.noise_sd = raw.noise_sd;
  out.values.reserve(T);
  out.mask.reserve(T);
  for (Index t = 0; t < T; ++t) {
    const auto& y = raw.values[t];
    if (y.rows() != n || y.cols() != n)
      throw DataError("series: slice " + std::to_string(t + 1) +
                      " is not n x n");
    BoolMatrix m = raw.mask.empty() ? BoolMatrix::Constant(n, n, true)
                                    : raw.mask[t];
    if (m.rows() != n || m.cols() != n)
      throw DataError("series: mask slice " + std::to_string(t + 1) +
                      " is not n x n");
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const std::string where = " at (t=" + std::to_string(t + 1) +
                                  ", i=" + std::to_string(i + 1) +
                                  ", j=" + std::to_string(j + 1) + ")";
        if (m(i, j) != m(j, i))
          throw DataError("series: asymmetric mask" + where);
        if (!m(i, j)) continue;
        const double v = y(i, j);
        if (!std::isfinite(v) || !std::isfinite(y(j, i)))
          throw DataError("series: non-finite value" + where);
        if (v != y(j, i)) throw DataError("series: asymmetric value" + where);
        if (raw.kind == LikelihoodKind::bernoulli && v != 0.0 && v != 1.0)
          throw DataError("series: bernoulli value outside {0,1}" + where);
      }
    }
    out.values.push_back(y);
    out.mask.push_back(std::move(m));
  }
  return out;
}

NetworkSeries validate_series(const NetworkSeries& series) {
  return validate_series(
      RawSeries{series.kind, series.values, series.mask, series.noise_sd});
}

double ModelConfig::stop_tolerance(LikelihoodKind kind) const {
  if (stop_tol) return *stop_tol;
  return kind == LikelihoodKind::bernoulli ? 0.01 : 1e-3;
}

void validate_config(const ModelConfig& cfg) {
  if (cfg.d < 1) throw ConfigError("d: must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
    throw ConfigError("alpha: must lie in (0, 1]");
  if (!(cfg.beta_prior_var > 0.0))
    throw ConfigError("beta_prior_var: must be positive");
  if (!std::isfinite(cfg.beta_prior_mean))
    throw ConfigError("beta_prior_mean: must be finite");
  if (cfg.max_iters < 0) throw ConfigError("max_iters: must be >= 0");
  if (cfg.stop_tol && !(*cfg.stop_tol >= 0.0))
    throw ConfigError("stop_tol: must be non-negative");
  if (const auto* f = std::get_if<FixedScales>(&cfg.scales)) {
    if (!(f->sigma0 > 0.0)) throw ConfigError("sigma0: must be positive");
    if (!(f->tau > 0.0)) throw ConfigError("tau: must be positive");
  } else {
    const ScaleHyper& h = cfg.nodewise()
                              ? std::get<AdaptiveNodewise>(cfg.scales).hyper
                              : std::get<AdaptiveGlobal>(cfg.scales).hyper;
    if (!(h.a_sigma0 > 0.0)) throw ConfigError("a_sigma0: must be positive");
    if (!(h.b_sigma0 > 0.0)) throw ConfigError("b_sigma0: must be positive");
    if (!(h.c_tau > 0.0)) throw ConfigError("c_tau: must be positive");
    if (!(h.d_tau > 0.0)) throw ConfigError("d_tau: must be positive");
  }
}

Eigen::MatrixXd VariationalState::positions(Index t) const {
  Eigen::MatrixXd X(n, d);
  for (Index i = 0; i < n; ++i) X.row(i) = mean[at(i, t)].transpose();
  return X;
}

bool operator==(const VariationalState& a, const VariationalState& b) {
  auto same = [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k].rows() != y[k].rows() || x[k].cols() != y[k].cols() ||
          x[k] != y[k])
        return false;
    return true;
  };
  auto same_gig = [](const GigParams& x, const GigParams& y) {
    return x.p == y.p && x.a == y.a && x.b == y.b &&
           x.mean_inverse == y.mean_inverse;
  };
  auto same_ig = [](const IgParams& x, const IgParams& y) {
    return x.shape == y.shape && x.rate == y.rate &&
           x.mean_inverse == y.mean_inverse;
  };
  return a.n == b.n && a.T == b.T && a.d == b.d && same(a.mean, b.mean) &&
         same(a.cov, b.cov) && same(a.cross, b.cross) &&
         a.beta_mean == b.beta_mean && a.beta_var == b.beta_var &&
         std::equal(a.tau.begin(), a.tau.end(), b.tau.begin(), b.tau.end(),
                    same_gig) &&
         std::equal(a.sigma0.begin(), a.sigma0.end(), b.sigma0.begin(),
                    b.sigma0.end(), same_ig) &&
         same(a.xi, b.xi);
}

VariationalState init_state(const ModelConfig& cfg, const NetworkSeries& data) {
  validate_config(cfg);
  constexpr double kInitVar = 0.01;

  VariationalState s;
  s.n = data.n;
  s.T = data.T;
  s.d = cfg.d;
  const Index n = s.n, T = s.T, d = s.d;

  Philox rng(cfg.seed, kStreamInit);
  s.mean.resize(n * T);
  s.cov.assign(n * T, kInitVar * Eigen::MatrixXd::Identity(d, d));
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < T; ++t) {
      Eigen::VectorXd m(d);
      for (Index k = 0; k < d; ++k) m(k) = rng.normal(0.0, std::sqrt(kInitVar));
      s.mean[s.at(i, t)] = std::move(m);
    }
  s.cross.assign(n * std::max<Index>(T - 1, 0), Eigen::MatrixXd::Zero(d, d));

  s.beta_mean = cfg.beta_prior_mean;
  s.beta_var = cfg.beta_prior_var;

  const Index copies = cfg.nodewise() ? n : 1;
  if (const auto* f = std::get_if<FixedScales>(&cfg.scales)) {
    s.tau.assign(1, GigParams{0, 0, 0, 1.0 / (f->tau * f->tau)});
    s.sigma0.assign(1, IgParams{0, 0, 1.0 / (f->sigma0 * f->sigma0)});
  } else {
    const ScaleHyper& h = cfg.nodewise()
                              ? std::get<AdaptiveNodewise>(cfg.scales).hyper
                              : std::get<AdaptiveGlobal>(cfg.scales).hyper;
    // Start from the priors: E[tau^2] = c/d under Gamma(c, d) and
    // E[1/sigma0^2] = a/b under Inverse-Gamma(a, b).
    GigParams tau0{h.c_tau, 2.0 * h.d_tau, 0.0, h.d_tau / h.c_tau};
    IgParams sig0{h.a_sigma0, h.b_sigma0, h.a_sigma0 / h.b_sigma0};
    s.tau.assign(copies, tau0);
    s.sigma0.assign(copies, sig0);
  }

  if (data.kind == LikelihoodKind::bernoulli)
    s.xi.assign(T, Eigen::MatrixXd::Ones(n, n));
  return s;
}

NeighborIndex::NeighborIndex(const NetworkSeries& series)
    : n_(series.n), lists_(series.T * series.n) {
  for (Index t = 0; t < series.T; ++t)
    for (Index i = 0; i < n_; ++i) {
      auto& list = lists_[t * n_ + i];
      for (Index j = 0; j < n_; ++j)
        if (j != i && series.mask[t](j, i)) list.push_back(j);
    }
}

}  // namespace dynlsm
