#include "dynlsm/scales.hpp"

#include <algorithm>
#include <cmath>

#include "dynlsm/bessel.hpp"

namespace dynlsm {

namespace {

const ScaleHyper& hyper_of(const ModelConfig& cfg) {
  if (const auto* g = std::get_if<AdaptiveGlobal>(&cfg.scales)) return g->hyper;
  if (const auto* n = std::get_if<AdaptiveNodewise>(&cfg.scales))
    return n->hyper;
  throw ConfigError("scales: fixed scales have no posterior update");
}

}  // namespace

double expected_transition_sq(const VariationalState& s, Index i) {
  double total = 0.0;
  for (Index t = 1; t < s.T; ++t) {
    const auto k = s.at(i, t);
    const auto km = s.at(i, t - 1);
    total += (s.mean[k] - s.mean[km]).squaredNorm() + s.cov[k].trace() +
             s.cov[km].trace() - 2.0 * s.cross[s.pair_at(i, t - 1)].trace();
  }
  return total;
}

double expected_initial_sq(const VariationalState& s, Index i) {
  const auto k = s.at(i, 0);
  return s.mean[k].squaredNorm() + s.cov[k].trace();
}

GigParams tau_posterior(double transition_sq, Index transitions, Index d,
                        const ScaleHyper& hyper) {
  GigParams g;
  g.p = (3.0 - static_cast<double>(transitions * d) - hyper.c_tau) / 2.0;
  g.a = 2.0 * hyper.d_tau;
  g.b = std::max(transition_sq, kMinTransitionSq);
  g.mean_inverse = gig_mean_inverse(g.p, g.a, g.b);
  if (!(g.mean_inverse > 0.0) || !std::isfinite(g.mean_inverse))
    throw NumericError("transition variance posterior has invalid moment");
  return g;
}

IgParams sigma0_posterior(double initial_sq, Index count, Index d,
                          const ScaleHyper& hyper) {
  IgParams ig;
  ig.shape = static_cast<double>(count * d) / 2.0 + hyper.a_sigma0;
  ig.rate = initial_sq / 2.0 + hyper.b_sigma0;
  ig.mean_inverse = ig.shape / ig.rate;
  return ig;
}

GigParams update_tau_global(const VariationalState& state,
                            const ModelConfig& cfg) {
  double total = 0.0;
  for (Index i = 0; i < state.n; ++i) total += expected_transition_sq(state, i);
  return tau_posterior(total, state.n * (state.T - 1), state.d, hyper_of(cfg));
}

IgParams update_sigma0_global(const VariationalState& state,
                              const ModelConfig& cfg) {
  double total = 0.0;
  for (Index i = 0; i < state.n; ++i) total += expected_initial_sq(state, i);
  return sigma0_posterior(total, state.n, state.d, hyper_of(cfg));
}

NodeScales update_scales_nodewise(const VariationalState& state,
                                  const ModelConfig& cfg) {
  const ScaleHyper& h = hyper_of(cfg);
  NodeScales out;
  out.tau.reserve(state.n);
  out.sigma0.reserve(state.n);
  for (Index i = 0; i < state.n; ++i) {
    out.tau.push_back(
        tau_posterior(expected_transition_sq(state, i), state.T - 1, state.d, h));
    out.sigma0.push_back(
        sigma0_posterior(expected_initial_sq(state, i), 1, state.d, h));
  }
  return out;
}

void update_scales(VariationalState& state, const ModelConfig& cfg) {
  if (!cfg.adaptive()) return;
  if (cfg.nodewise()) {
    auto ns = update_scales_nodewise(state, cfg);
    state.tau = std::move(ns.tau);
    state.sigma0 = std::move(ns.sigma0);
  } else {
    state.tau.assign(1, update_tau_global(state, cfg));
    state.sigma0.assign(1, update_sigma0_global(state, cfg));
  }
}

}  // namespace dynlsm
