#pragma once

#include <cstdint>
#include <vector>

#include "dynlsm/metrics.hpp"
#include "dynlsm/model.hpp"

namespace dynlsm {

struct SimulatedSeries {
  NetworkSeries series;
  std::vector<Eigen::MatrixXd> truth;          // T matrices n x d
  std::vector<Eigen::MatrixXd> probabilities;  // T matrices n x n (binary)
};

struct BinarySimSpec {
  Index n = 100;
  Index T = 10;
  Index d = 2;
  double tau = 0.1;
  double rho = 0.0;
  double intercept = 1.0;
  std::uint64_t seed = 0;
};

struct GaussianSimSpec {
  Index n = 100;
  Index T = 100;
  Index d = 2;
  double tau = 0.01;
  double intercept = 0.1;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;
};

// Initial positions from the two-component mixture
// 0.5 N(( 1.5, 0, ...), 0.25 I) + 0.5 N((-1.5, 0, ...), 0.25 I); per node and
// coordinate the T-1 increments are jointly N(0, tau^2((1-rho) I + rho 11')).
// Edges are Bernoulli with logit intercept + x_it'x_jt.
//
// Draw order on stream kStreamSimulate: per node (component uniform, then d
// normals); per node and coordinate (shared normal, then T-1 normals); per
// time, pairs i < j row-major, one uniform each.
SimulatedSeries simulate_binary(const BinarySimSpec& spec);

// x_i1 ~ N(0, tau^2 I), i.i.d. N(0, tau^2 I) increments and
// Y_ijt = intercept + x_it'x_jt + noise_sd * z. Same draw order as the binary
// simulator with one normal per pair instead of a uniform.
SimulatedSeries simulate_gaussian(const GaussianSimSpec& spec);

struct HeldoutEntry {
  EdgeRef edge;
  double value;
};

struct MaskedSeries {
  NetworkSeries train;
  std::vector<HeldoutEntry> heldout;
};

// Drops each observed unordered (t, i, j) independently with probability
// p_missing (stream kStreamMask).
MaskedSeries mask_edges(const NetworkSeries& series, double p_missing,
                        std::uint64_t seed);

// Inverse of mask_edges: restores the heldout entries.
NetworkSeries unmask(const NetworkSeries& train,
                     const std::vector<HeldoutEntry>& heldout);

}  // namespace dynlsm
