#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace dynlsm {

using Index = Eigen::Index;

// Raised for malformed input data (asymmetry, bad domain, bad files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A linear-algebra failure inside the fit. node/time are -1 when not
// applicable.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, Index node = -1, Index time = -1);
  Index node() const { return node_; }
  Index time() const { return time_; }

 private:
  Index node_;
  Index time_;
};

enum class LikelihoodKind { gaussian, bernoulli };

std::string to_string(LikelihoodKind kind);
LikelihoodKind parse_kind(const std::string& s);

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Observed T x n x n symmetric network tensor. Diagonals are stored but
// never read.
struct NetworkSeries {
  LikelihoodKind kind = LikelihoodKind::bernoulli;
  Index n = 0;
  Index T = 0;
  std::vector<Eigen::MatrixXd> values;  // T entries, n x n
  std::vector<BoolMatrix> mask;         // true = observed
  double noise_sd = 1.0;                // gaussian kind only

  bool observed(Index t, Index i, Index j) const {
    return i != j && mask[t](i, j);
  }
  Index observed_count() const;  // unordered observed pairs
};

// Raw tensor input for validate_series. mask may be empty (fully observed).
struct RawSeries {
  LikelihoodKind kind = LikelihoodKind::bernoulli;
  std::vector<Eigen::MatrixXd> values;
  std::vector<BoolMatrix> mask;
  double noise_sd = 1.0;
};

NetworkSeries validate_series(const RawSeries& raw);
NetworkSeries validate_series(const NetworkSeries& series);

enum class Family { smf, mf };
std::string to_string(Family f);
Family parse_family(const std::string& s);

struct FixedScales {
  double sigma0 = 0.5;
  double tau = 0.1;
};

struct ScaleHyper {
  double a_sigma0 = 0.5;
  double b_sigma0 = 0.5;
  double c_tau = 1.0;
  double d_tau = 0.5;
};

struct AdaptiveGlobal {
  ScaleHyper hyper;
};

struct AdaptiveNodewise {
  ScaleHyper hyper;
};

using ScaleMode = std::variant<FixedScales, AdaptiveGlobal, AdaptiveNodewise>;

std::string scale_mode_name(const ScaleMode& mode);

struct ModelConfig {
  Index d = 2;
  double alpha = 0.95;
  Family family = Family::smf;
  ScaleMode scales = AdaptiveGlobal{};
  double beta_prior_mean = 0.0;
  double beta_prior_var = 10.0;
  int max_iters = 50;
  // When unset: 0.01 on training AUC (bernoulli), 1e-3 on training RMSE
  // (gaussian).
  std::optional<double> stop_tol;
  // Training-AUC floor before the bernoulli stopping rule may fire.
  double auc_floor = 0.55;
  std::uint64_t seed = 0;
  bool jacobi = false;

  double stop_tolerance(LikelihoodKind kind) const;
  bool adaptive() const { return !std::holds_alternative<FixedScales>(scales); }
  bool nodewise() const {
    return std::holds_alternative<AdaptiveNodewise>(scales);
  }
};

void validate_config(const ModelConfig& cfg);

// Gaussian factor in canonical form: density proportional to
// exp(-x'Jx/2 + h'x). J need not be positive definite.
template <typename Scalar>
struct CanonicalGaussian {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix J;
  Vector h;

  static CanonicalGaussian zero(Index d) {
    return {Matrix::Zero(d, d), Vector::Zero(d)};
  }
  CanonicalGaussian& operator+=(const CanonicalGaussian& o) {
    J += o.J;
    h += o.h;
    return *this;
  }
  friend CanonicalGaussian operator+(CanonicalGaussian a,
                                     const CanonicalGaussian& b) {
    a += b;
    return a;
  }
};

template <typename Scalar>
struct GaussianMoment {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector mu;
  Matrix Sigma;
};

using Canonical = CanonicalGaussian<double>;
using Moment = GaussianMoment<double>;

// q(tau^2) = GIG(p, a, b) with density x^{p-1} exp(-(a x + b / x) / 2).
struct GigParams {
  double p = 0.0;
  double a = 0.0;
  double b = 0.0;
  double mean_inverse = 1.0;  // E[1 / tau^2]
};

// q(sigma0^2) = Inverse-Gamma(shape, rate).
struct IgParams {
  double shape = 0.0;
  double rate = 0.0;
  double mean_inverse = 1.0;  // E[1 / sigma0^2]
};

struct VariationalState {
  Index n = 0;
  Index T = 0;
  Index d = 0;
  // Node marginals q_it, flattened at i * T + t.
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> cov;
  // Cov(x_it, x_i(t+1)) at i * (T - 1) + t. Zero under MF.
  std::vector<Eigen::MatrixXd> cross;
  double beta_mean = 0.0;
  double beta_var = 1.0;
  // One entry for global scales, n for node-wise.
  std::vector<GigParams> tau;
  std::vector<IgParams> sigma0;
  // Tangent parameters, T matrices n x n (symmetric). Empty for gaussian.
  std::vector<Eigen::MatrixXd> xi;

  Index at(Index i, Index t) const { return i * T + t; }
  Index pair_at(Index i, Index t) const { return i * (T - 1) + t; }
  double inv_tau2(Index i) const {
    return tau.size() == 1 ? tau[0].mean_inverse : tau[i].mean_inverse;
  }
  double inv_sigma02(Index i) const {
    return sigma0.size() == 1 ? sigma0[0].mean_inverse
                              : sigma0[i].mean_inverse;
  }
  // n x d matrix of means at time t.
  Eigen::MatrixXd positions(Index t) const;
};

bool operator==(const VariationalState& a, const VariationalState& b);

VariationalState init_state(const ModelConfig& cfg, const NetworkSeries& data);

struct TraceRecord {
  int sweep = 0;
  double statistic = 0.0;
  std::optional<double> elbo;
  double wall_seconds = 0.0;
};

struct FitResult {
  VariationalState state;
  std::vector<TraceRecord> trace;
  bool converged = false;
  int iterations = 0;
};

// Observed neighbours of each (t, i), built once per fit.
class NeighborIndex {
 public:
  explicit NeighborIndex(const NetworkSeries& series);
  const std::vector<Index>& operator()(Index t, Index i) const {
    return lists_[t * n_ + i];
  }

 private:
  Index n_;
  std::vector<std::vector<Index>> lists_;
};

}  // namespace dynlsm
