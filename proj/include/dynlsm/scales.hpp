#pragma once

#include <vector>

#include "dynlsm/model.hpp"

namespace dynlsm {

// Floor on the expected squared transition length entering the GIG update.
inline constexpr double kMinTransitionSq = 1e-12;

// E_q sum_{t>=1} ||x_it - x_i(t-1)||^2, using the stored cross-covariances
// (zero under MF).
double expected_transition_sq(const VariationalState& state, Index i);

// E_q ||x_i0||^2.
double expected_initial_sq(const VariationalState& state, Index i);

// q(tau^2) proportional to
//   exp(-B / (2 tau^2) - (m d + c_tau - 1)/2 log tau^2 - d_tau tau^2)
// with B the expected squared transitions and m the number of transitions.
// As GIG(p, a, b): p = (3 - m d - c_tau) / 2, a = 2 d_tau, b = B.
GigParams tau_posterior(double transition_sq, Index transitions, Index d,
                        const ScaleHyper& hyper);

// q(sigma0^2) proportional to
//   exp(-S / (2 sigma0^2) - (k d / 2 + a + 1) log sigma0^2 - b / sigma0^2)
// i.e. Inverse-Gamma(k d / 2 + a, S / 2 + b) for k initial positions.
IgParams sigma0_posterior(double initial_sq, Index count, Index d,
                          const ScaleHyper& hyper);

GigParams update_tau_global(const VariationalState& state,
                            const ModelConfig& cfg);
IgParams update_sigma0_global(const VariationalState& state,
                              const ModelConfig& cfg);

struct NodeScales {
  std::vector<GigParams> tau;
  std::vector<IgParams> sigma0;
};

NodeScales update_scales_nodewise(const VariationalState& state,
                                  const ModelConfig& cfg);

// Applies whichever update cfg.scales selects; no-op for fixed scales.
void update_scales(VariationalState& state, const ModelConfig& cfg);

}  // namespace dynlsm
