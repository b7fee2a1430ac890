#pragma once

#include "dynlsm/model.hpp"

namespace dynlsm {

// Fully factorised CAVI update for q(x_it): the single-time potential plus
// E[1/tau^2] times the current means of the temporal neighbours.
Moment mf_update_node_time(Index i, Index t, const VariationalState& state,
                           const NetworkSeries& data, const NeighborIndex& nbrs,
                           const ModelConfig& cfg);

// One Gauss-Seidel pass over (i, t), i outer and t inner, followed by the
// intercept, tangent parameters (bernoulli) and scales (adaptive).
void mf_sweep(VariationalState& state, const NetworkSeries& data,
              const NeighborIndex& nbrs, const ModelConfig& cfg);

}  // namespace dynlsm
