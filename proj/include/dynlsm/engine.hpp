#pragma once

#include <memory>

#include "dynlsm/model.hpp"

namespace dynlsm {

// Structured mean-field sweep: for each node in order, rebuild its chain
// potentials, run message passing and store unary marginals and
// cross-covariances; then the intercept, tangent parameters and scales.
void sweep_smf(VariationalState& state, const NetworkSeries& data,
               const NeighborIndex& nbrs, const ModelConfig& cfg);

// Dispatches on cfg.family.
void sweep(VariationalState& state, const NetworkSeries& data,
           const NeighborIndex& nbrs, const ModelConfig& cfg);

// Exact ELBO for the gaussian likelihood with fixed scales. Throws
// ConfigError in adaptive modes or for bernoulli data.
double elbo_fixed_scale_gaussian(const VariationalState& state,
                                 const NetworkSeries& data,
                                 const ModelConfig& cfg);

// Training AUC of plug-in probabilities (bernoulli) or training RMSE of
// E[beta + x_i'x_j] (gaussian), over observed unordered pairs.
double stopping_statistic(const VariationalState& state,
                          const NetworkSeries& data);

// A numeric failure during fit(); carries everything completed so far.
class FitError : public NumericError {
 public:
  FitError(const NumericError& cause, std::shared_ptr<const FitResult> partial);
  const FitResult& partial() const { return *partial_; }

 private:
  std::shared_ptr<const FitResult> partial_;
};

FitResult fit(const NetworkSeries& data, const ModelConfig& cfg);

// Continues from a given state (used by tests and warm starts).
FitResult fit_from(VariationalState state, const NetworkSeries& data,
                   const ModelConfig& cfg);

}  // namespace dynlsm
