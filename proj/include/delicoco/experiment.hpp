#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delicoco/optim.hpp"
#include "delicoco/theory.hpp"

namespace delicoco {

// One experiment, as described by a JSON config file. Unknown keys are
// rejected so a typo cannot silently fall back to a default.
struct ExperimentConfig {
  std::string task;  // syn1 | syn2 | mnist
  int m = 0;
  int d = 0;
  double noise_var = 0.0;
  double l2 = 0.0;
  std::string mnist_images;  // default: $DELICOCO_MNIST_DIR/train-images-idx3-ubyte
  std::string mnist_labels;  // default: $DELICOCO_MNIST_DIR/train-labels-idx1-ubyte
  std::string partition;     // even | sorted; default: sorted for mnist, even otherwise

  std::string topology;
  int n = 0;

  std::string compressor;
  double eta = 0.0;
  double gamma = 0.0;
  bool gamma_auto = false;  // gamma = "auto" resolves via consensus_lr
  int q_steps = 1;
  int iters = 1;
  std::uint64_t seed = 0;
  std::string bit_mode = "nominal";
  std::string algorithm = "deli_coco";  // deli_coco | dgd | centralized
  int repeats = 1;
  std::string out_dir = "out";

  // Centralized-optimum solve used to pin f*.
  double fstar_step = 0.0;  // 0 = auto (1 / sum_i L_i)
  double fstar_tol = 1e-10;
  int fstar_max_iters = 100000;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text, const std::string& origin);

// Everything a run needs, resolved: data, partition, mixing matrix, f*.
// f* is cached under out_dir as fstar_<key>.json and reused when the
// problem-defining parameters match.
struct PreparedExperiment {
  DistributedObjective obj;
  MixingMatrix mixing;
  double f_star = 0.0;
  Vector x_star;
  bool fstar_tol_met = false;
  std::string fstar_cache_path;
  double omega = 0.0;
  double gamma_used = 0.0;
  Vector x_init;  // empty = zero init; nonzero seeded start for relu tasks
  AlgoConfig algo;
};

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg);

// For the relu task the all-zero iterate is a stationary point of the model
// (every sample sits on the kink with zero subgradient), so runs start from
// a small seeded vector instead, shared by the centralized reference and
// replicated into every node column.
Vector relu_start_point(std::uint64_t master_seed, int d);
Matrix consensual_columns(const Vector& x, int n);

// Master-seed derivations: repeats share the dataset and vary only the
// compression randomness; so do sweep entries.
std::uint64_t repeat_seed(std::uint64_t master_seed, int repeat_index);
std::uint64_t sweep_seed(std::uint64_t master_seed, int value_index);

struct RunOutput {
  std::vector<std::string> trace_paths;  // one per repeat
  std::string mean_trace_path;           // set when repeats > 1
  double final_suboptimality = 0.0;      // averaged over repeats
};

RunOutput run_experiment(const ExperimentConfig& cfg);

struct SweepEntryResult {
  std::string value;
  std::string status;  // ok | config_error | divergence | io_error
  std::string message;
  double gamma_used = 0.0;
  double final_suboptimality = 0.0;
  double final_consensus_error = 0.0;
  std::int64_t total_bits = 0;
  std::string trace_path;
};

struct SweepOutput {
  std::string summary_path;
  std::vector<SweepEntryResult> entries;
  bool all_ok = true;
};

// Re-runs the experiment for each value of one axis; every entry sees the
// same dataset but an independent compression sub-stream.
SweepOutput run_sweep(const ExperimentConfig& cfg, const std::string& axis,
                      const std::vector<std::string>& values);

struct BudgetPair {
  int q_steps = 0;
  double param = 0.0;  // qsgd bit width or sparsifier fraction
  CompressorSpec spec;
};

// Fixed-budget pairing: mode "qsgd_bits" holds Q*b constant, mode
// "topk_fraction" holds Q*k constant. Every derived pair must cost exactly
// the same nominal bits per iteration, or the whole sweep is rejected
// naming the offending pair.
std::vector<BudgetPair> derive_budget_pairs(const std::string& mode, int base_q,
                                            double base_param, const std::vector<int>& c_list,
                                            int d);

struct BudgetOutput {
  std::string summary_path;
  std::vector<std::string> trace_paths;
  std::vector<double> final_suboptimality;  // per pair, averaged over repeats
};

BudgetOutput run_budget(const ExperimentConfig& cfg, const std::string& mode, int base_q,
                        double base_param, const std::vector<int>& c_list);

// CSV table of gamma, rates, Q0 and g(c) over a grid of spectral/compression
// parameters.
std::string theory_table(const std::vector<double>& deltas, const std::vector<double>& omegas,
                         const std::vector<double>& lambda_maxes, double rho_bar, int q_base,
                         const std::vector<int>& c_list);

// Writes the configured dataset as CSV; synthetic tasks also persist the
// generating parameter vector as <out_path>.theta.json.
std::string generate_dataset(const ExperimentConfig& cfg, const std::string& out_path);

}  // namespace delicoco
