#pragma once

#include <cstdint>

#include "dynlsm/model.hpp"
#include "dynlsm/rng.hpp"

namespace dynlsm::fixture {

// Fully observed symmetric series with N(0, 1) gaussian values or fair coin
// bernoulli values.
inline NetworkSeries random_series(LikelihoodKind kind, Index n, Index T,
                                   std::uint64_t seed, double noise_sd = 1.0) {
  Philox rng(seed, 99);
  RawSeries raw;
  raw.kind = kind;
  raw.noise_sd = noise_sd;
  for (Index t = 0; t < T; ++t) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const double v = kind == LikelihoodKind::gaussian
                             ? rng.normal()
                             : (rng.uniform() < 0.5 ? 1.0 : 0.0);
        y(i, j) = y(j, i) = v;
      }
    raw.values.push_back(y);
  }
  return validate_series(raw);
}

inline ModelConfig fixed_config(Index d, double sigma0, double tau) {
  ModelConfig cfg;
  cfg.d = d;
  cfg.scales = FixedScales{sigma0, tau};
  return cfg;
}

}  // namespace dynlsm::fixture
