#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "delicoco/compression.hpp"
#include "delicoco/numkit.hpp"
#include "delicoco/objectives.hpp"
#include "delicoco/topology.hpp"

namespace delicoco {

struct AlgoConfig {
  double eta = 0.1;            // gradient step size
  double gamma = 1.0;          // consensus step size, in (0, 1]
  int q_steps = 1;             // gossip rounds per gradient iteration
  int iters = 100;             // gradient iterations
  CompressorSpec compressor;
  MixingMatrix mixing;
  BitCostMode bit_mode = BitCostMode::nominal;
  std::uint64_t seed = 0;
};

// The three stacked d x n iterate matrices: parameters X, error-feedback
// shadow Z, aggregated neighbor estimate S.
struct NodeStates {
  Matrix x, z, s;

  static NodeStates zeros(int d, int n) { return {Matrix(d, n), Matrix(d, n), Matrix(d, n)}; }
};

struct TraceRow {
  int iter = 0;
  double suboptimality = 0.0;   // f(mean iterate) - f_star
  double consensus_error = 0.0; // ||X - xbar 1^T||_F^2
  double feedback_gap = 0.0;    // ||X - Z||_F^2
  std::int64_t cumulative_bits = 0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::map<std::string, std::string> metadata;
};

// Compressor randomness for column `node` of gossip round (t, q) of the run
// seeded with run_seed. Deriving from indices rather than sequencing one
// stream keeps traces reproducible regardless of evaluation order.
SeededRng compression_rng(std::uint64_t run_seed, int t, int q, int node);

// One compressed gossip round:
//   M  = C(X - Z)      (column-wise, one independent draw per column)
//   S' = S + M W
//   Z' = Z + M
//   X' = X + gamma (S' - Z')
// Exactly one compressed message per node is charged by the caller.
NodeStates gossip_round(const NodeStates& states, const MixingMatrix& mixing, double gamma,
                        const CompressorSpec& compressor, std::uint64_t run_seed, int t, int q);

// (||X - xbar 1^T||_F^2, ||X - Z||_F^2)
std::pair<double, double> consensus_error(const NodeStates& states);

// T iterations of: per-node gradient step on f_i, then Q compressed gossip
// rounds. Z and S persist across iterations; metrics are recorded once per
// iteration after the last gossip round. Starts from X = 0 unless x0 is
// given (columns then must match the objective dimension / node count).
RunTrace deli_coco(const AlgoConfig& config, const DistributedObjective& obj, double f_star,
                   const Matrix* x0 = nullptr);

// Decentralized gradient descent, X_{t+1} = (X_t - eta grad F(X_t)) W.
// Runs the same engine pinned to Q=1, gamma=1, identity compression, so the
// reduction holds bit-for-bit; messages are charged uncompressed (d*32).
RunTrace dgd(const AlgoConfig& config, const DistributedObjective& obj, double f_star,
             const Matrix* x0 = nullptr);

// Single-machine gradient descent on f, traced on the same schedule
// (consensus columns are zero, no bits are charged).
RunTrace centralized_gd(const AlgoConfig& config, const DistributedObjective& obj, double f_star,
                        const Vector* x0 = nullptr);

}  // namespace delicoco
