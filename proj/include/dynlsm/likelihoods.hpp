#pragma once

#include <vector>

#include "dynlsm/chain.hpp"
#include "dynlsm/model.hpp"

namespace dynlsm {

// Coefficients of the logistic tangent bound
//   log sigma(s) >= A s^2 + s / 2 + C   (for the Y - 1/2 parametrisation).
struct TangentCoeffs {
  double A;
  double C;
};

// Uses |xi|; A(0) = -1/8 and C(0) = -log 2.
TangentCoeffs tangent_coeffs(double xi);
double tangent_a(double xi);

// Chain potentials for node i. Every unordered observed pair contributes
// its likelihood term once. The random-walk prior adds E[1/tau^2] I per
// incident chain edge and E[1/sigma0^2] I at t = 0; the coupling between
// consecutive times is E[1/tau^2].
ChainPotentials<double> potentials_gaussian(Index i,
                                            const VariationalState& state,
                                            const NetworkSeries& data,
                                            const NeighborIndex& nbrs,
                                            const ModelConfig& cfg);
ChainPotentials<double> potentials_bernoulli(Index i,
                                             const VariationalState& state,
                                             const NetworkSeries& data,
                                             const NeighborIndex& nbrs,
                                             const ModelConfig& cfg);
ChainPotentials<double> node_potentials(Index i, const VariationalState& state,
                                        const NetworkSeries& data,
                                        const NeighborIndex& nbrs,
                                        const ModelConfig& cfg);

// Unary potential of node i at time t alone (prior edges plus likelihood).
Canonical time_potential(Index i, Index t, const VariationalState& state,
                         const NetworkSeries& data, const NeighborIndex& nbrs,
                         const ModelConfig& cfg);

// E[(beta + x_i'x_j)^2] under the factorised q.
double expected_sq_predictor(double beta_mean, double beta_var,
                             const Eigen::VectorXd& mu_i,
                             const Eigen::MatrixXd& cov_i,
                             const Eigen::VectorXd& mu_j,
                             const Eigen::MatrixXd& cov_j);

// Sets xi_ijt = sqrt(E[(beta + x_it'x_jt)^2]) on observed entries, in
// place; other entries keep their current value.
void update_xi(VariationalState& state, const NeighborIndex& nbrs);

struct BetaPosterior {
  double mean;
  double var;
};

BetaPosterior update_beta(const VariationalState& state,
                          const NetworkSeries& data, const NeighborIndex& nbrs,
                          const ModelConfig& cfg);

}  // namespace dynlsm
