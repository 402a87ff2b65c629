#pragma once

#include <string>
#include <vector>

#include "delicoco/numkit.hpp"

namespace delicoco {

enum class TopologyKind { ring, torus, fully_connected, disconnected };

TopologyKind topology_kind_from_string(const std::string& s);
std::string to_string(TopologyKind kind);

// Undirected communication graph. Adjacency is stored as sorted neighbor
// lists without self loops; self weights come from the mixing rule.
struct Topology {
  TopologyKind kind;
  int n;
  std::vector<std::vector<int>> neighbors;

  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
};

// ring: cycle graph (n >= 3). torus: sqrt(n) x sqrt(n) grid with wrap-around
// in both axes (n a perfect square >= 4); in a 3-cycle the two wrap
// neighbors are distinct, so degree is exactly 4. fully_connected: complete
// graph. disconnected: two fully-connected halves with no cross edges.
Topology build_topology(TopologyKind kind, int n);

// Symmetric doubly-stochastic gossip weights plus the cached spectral
// quantities the tuning formulas need.
struct MixingMatrix {
  Matrix w;
  double delta = 0.0;                // spectral gap 1 - |lambda_2(W)|
  double lambda_max_i_minus_w = 0.0; // 1 - lambda_min(W)
  bool connected = true;             // false means delta was clamped to 0
};

struct SpectralQuantities {
  double delta = 0.0;
  double lambda_max_i_minus_w = 0.0;
  bool connected = true;
};

// delta = 1 - (second largest |eigenvalue|), lambda_max_i_minus_w =
// 1 - lambda_min(W). A gap below 1e-12 marks the graph disconnected and
// clamps delta to exactly 0.
SpectralQuantities spectral_quantities(const Matrix& w);

// Metropolis-Hastings weights: w_ij = 1/(1 + max(deg_i, deg_j)) on edges,
// w_ii = 1 - sum_j w_ij. The fully connected graph instead gets uniform
// averaging W = (1/n) * ones, whose gap is exactly 1.
MixingMatrix metropolis_mixing(const Topology& t);

}  // namespace delicoco
