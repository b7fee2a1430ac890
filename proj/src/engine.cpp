#include "dynlsm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "dynlsm/chain.hpp"
#include "dynlsm/likelihoods.hpp"
#include "dynlsm/mean_field.hpp"
#include "dynlsm/metrics.hpp"
#include "dynlsm/scales.hpp"

namespace dynlsm {

namespace {

ChainMarginals<double> node_chain(Index i, const VariationalState& state,
                                  const NetworkSeries& data,
                                  const NeighborIndex& nbrs,
                                  const ModelConfig& cfg) {
  const auto pots = node_potentials(i, state, data, nbrs, cfg);
  try {
    return chain_marginals(pots);
  } catch (const NumericError& e) {
    throw NumericError("chain update: precision not positive definite", i,
                       e.time());
  }
}

void store_chain(Index i, ChainMarginals<double>&& marg,
                 VariationalState& state) {
  for (Index t = 0; t < state.T; ++t) {
    state.mean[state.at(i, t)] = std::move(marg.unary[t].mu);
    state.cov[state.at(i, t)] = std::move(marg.unary[t].Sigma);
  }
  for (Index t = 0; t + 1 < state.T; ++t)
    state.cross[state.pair_at(i, t)] = marg.pairs[t].cross(state.d);
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DYNLSM_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

// All chains computed from the same snapshot, then written back.
void jacobi_nodes(VariationalState& state, const NetworkSeries& data,
                  const NeighborIndex& nbrs, const ModelConfig& cfg) {
  const Index n = state.n;
  std::vector<ChainMarginals<double>> results(n);
  const unsigned workers =
      std::min<unsigned>(worker_count(), static_cast<unsigned>(n));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (Index i = w; i < n; i += workers) {
          try {
            results[i] = node_chain(i, state, data, nbrs, cfg);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
  for (Index i = 0; i < n; ++i) store_chain(i, std::move(results[i]), state);
}

void finish_sweep(VariationalState& state, const NetworkSeries& data,
                  const NeighborIndex& nbrs, const ModelConfig& cfg) {
  const auto beta = update_beta(state, data, nbrs, cfg);
  state.beta_mean = beta.mean;
  state.beta_var = beta.var;
  if (data.kind == LikelihoodKind::bernoulli) update_xi(state, nbrs);
  update_scales(state, cfg);
}

}  // namespace

void sweep_smf(VariationalState& state, const NetworkSeries& data,
               const NeighborIndex& nbrs, const ModelConfig& cfg) {
  if (cfg.jacobi) {
    jacobi_nodes(state, data, nbrs, cfg);
  } else {
    for (Index i = 0; i < state.n; ++i)
      store_chain(i, node_chain(i, state, data, nbrs, cfg), state);
  }
  finish_sweep(state, data, nbrs, cfg);
}

void sweep(VariationalState& state, const NetworkSeries& data,
           const NeighborIndex& nbrs, const ModelConfig& cfg) {
  if (cfg.family == Family::smf)
    sweep_smf(state, data, nbrs, cfg);
  else
    mf_sweep(state, data, nbrs, cfg);
}

double stopping_statistic(const VariationalState& state,
                          const NetworkSeries& data) {
  std::vector<double> pred, label;
  for (Index t = 0; t < state.T; ++t)
    for (Index j = 1; j < state.n; ++j)
      for (Index i = 0; i < j; ++i) {
        if (!data.mask[t](i, j)) continue;
        const double eta = state.beta_mean + state.mean[state.at(i, t)].dot(
                                                 state.mean[state.at(j, t)]);
        pred.push_back(eta);
        label.push_back(data.values[t](i, j));
      }
  if (data.kind == LikelihoodKind::gaussian) {
    if (pred.empty()) return 0.0;
    double sse = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k)
      sse += (pred[k] - label[k]) * (pred[k] - label[k]);
    return std::sqrt(sse / static_cast<double>(pred.size()));
  }
  // The logistic link is monotone, so AUC on eta equals AUC on the
  // probabilities. A single-class training set has no AUC; report 0.5.
  const auto positives = std::count(label.begin(), label.end(), 1.0);
  if (positives == 0 || positives == static_cast<long>(label.size()))
    return 0.5;
  return auc(pred, label);
}

FitError::FitError(const NumericError& cause,
                   std::shared_ptr<const FitResult> partial)
    : NumericError(cause.what(), -1, -1), partial_(std::move(partial)) {}

FitResult fit(const NetworkSeries& data, const ModelConfig& cfg) {
  return fit_from(init_state(cfg, data), data, cfg);
}

FitResult fit_from(VariationalState state, const NetworkSeries& data,
                   const ModelConfig& cfg) {
  validate_config(cfg);
  const NeighborIndex nbrs(data);
  const bool binary = data.kind == LikelihoodKind::bernoulli;
  const bool track_elbo = !binary && !cfg.adaptive();
  const double tol = cfg.stop_tolerance(data.kind);

  FitResult result;
  double previous = stopping_statistic(state, data);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const auto start = std::chrono::steady_clock::now();
    try {
      sweep(state, data, nbrs, cfg);
    } catch (const NumericError& e) {
      result.state = std::move(state);
      throw FitError(e, std::make_shared<const FitResult>(std::move(result)));
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    TraceRecord rec;
    rec.sweep = it;
    rec.statistic = stopping_statistic(state, data);
    if (track_elbo) rec.elbo = elbo_fixed_scale_gaussian(state, data, cfg);
    rec.wall_seconds = seconds;
    result.trace.push_back(rec);
    result.iterations = it;

    const double delta = std::abs(rec.statistic - previous);
    previous = rec.statistic;
    const bool done = binary ? (delta <= tol && rec.statistic > cfg.auc_floor)
                             : delta < tol;
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.state = std::move(state);
  return result;
}

}  // namespace dynlsm
