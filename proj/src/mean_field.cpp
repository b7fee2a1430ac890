#include "dynlsm/mean_field.hpp"

#include "dynlsm/chain.hpp"
#include "dynlsm/likelihoods.hpp"
#include "dynlsm/scales.hpp"

namespace dynlsm {

Moment mf_update_node_time(Index i, Index t, const VariationalState& state,
                           const NetworkSeries& data, const NeighborIndex& nbrs,
                           const ModelConfig& cfg) {
  Canonical u = time_potential(i, t, state, data, nbrs, cfg);
  const double c = state.inv_tau2(i);
  if (t > 0) u.h.noalias() += c * state.mean[state.at(i, t - 1)];
  if (t + 1 < state.T) u.h.noalias() += c * state.mean[state.at(i, t + 1)];
  try {
    return detail::to_moment(u, "mean-field update", t);
  } catch (const NumericError&) {
    throw NumericError("mean-field update: precision not positive definite", i,
                       t);
  }
}

void mf_sweep(VariationalState& state, const NetworkSeries& data,
              const NeighborIndex& nbrs, const ModelConfig& cfg) {
  for (Index i = 0; i < state.n; ++i)
    for (Index t = 0; t < state.T; ++t) {
      Moment m = mf_update_node_time(i, t, state, data, nbrs, cfg);
      state.mean[state.at(i, t)] = std::move(m.mu);
      state.cov[state.at(i, t)] = std::move(m.Sigma);
    }
  for (auto& c : state.cross) c.setZero();

  const auto beta = update_beta(state, data, nbrs, cfg);
  state.beta_mean = beta.mean;
  state.beta_var = beta.var;
  if (data.kind == LikelihoodKind::bernoulli) update_xi(state, nbrs);
  update_scales(state, cfg);
}

}  // namespace dynlsm
