#pragma once

#include <string>
#include <utility>
#include <vector>

#include "delicoco/numkit.hpp"

namespace delicoco {

enum class TaskKind { logistic, linear, relu };

TaskKind task_kind_from_string(const std::string& s);
std::string to_string(TaskKind task);

// One sample per feature row. Logistic labels are 0/1; regression labels
// are real-valued.
struct Dataset {
  Matrix features;  // m x d
  Vector labels;    // length m
  TaskKind task = TaskKind::linear;

  int sample_count() const { return features.rows; }
  int dim() const { return features.cols; }
};

// Disjoint contiguous [begin, end) sample ranges, one per node, covering
// all samples; sizes differ by at most one.
struct Partition {
  std::vector<std::pair<int, int>> node_ranges;

  int node_count() const { return static_cast<int>(node_ranges.size()); }
  int node_size(int i) const { return node_ranges[i].second - node_ranges[i].first; }
};

Partition partition_even(int m, int n);

// Stably sorts the dataset by label in place, then splits into n contiguous
// near-equal ranges. With binary labels this leaves at most one node holding
// samples of both classes.
Partition partition_sorted(Dataset& dataset, int n);

// f(x) = sum_i f_i(x) with
//   f_i(x) = (1/n_i) sum_{j in node i} loss(x, s_j) + (l2/2) ||x||^2.
// Per-sample losses:
//   linear    0.5 * (<a, x> - y)^2
//   relu      0.5 * (relu(<a, x>) - y)^2
//   logistic  binary cross-entropy, log-sum-exp form
struct DistributedObjective {
  Dataset dataset;
  Partition partition;
  double l2 = 0.0;
  int n = 1;
};

DistributedObjective make_objective(Dataset dataset, Partition partition, double l2);

struct SynData {
  Dataset dataset;
  Vector theta_star;
};

// y_i = <theta*, a_i> + e_i with theta* ~ N(0, I_d), a_i ~ N(0, I_d),
// e_i ~ N(0, noise_var). Draw order off rng: theta* (d draws), then features
// row-major (m*d), then noise (m draws, skipped when noise_var == 0).
SynData gen_syn1(SeededRng& rng, int m, int d, double noise_var);

// Same generation with y_i = relu(<theta*, a_i>) + e_i.
SynData gen_syn2(SeededRng& rng, int m, int d, double noise_var);

// IDX-format ingestion (big-endian; magic 2051 for images, 2049 for labels).
// Pixels are scaled to [0,1]; digits 0-4 become class 0, digits 5-9 class 1.
Dataset load_mnist_binary(const std::string& image_path, const std::string& label_path);

// CSV with a header row: f0,...,f{d-1},label.
void save_dataset_csv(const Dataset& dataset, const std::string& path);
Dataset load_dataset_csv(const std::string& path, TaskKind task);

double local_loss(const DistributedObjective& obj, int node, const Vector& x);
Vector local_grad(const DistributedObjective& obj, int node, const Vector& x);
double global_loss(const DistributedObjective& obj, const Vector& x);
Vector global_grad(const DistributedObjective& obj, const Vector& x);

struct OptimResult {
  Vector x_star;
  double f_star = 0.0;
  bool tol_met = false;
  int iters = 0;
  double grad_norm = 0.0;
};

// Full-batch gradient descent on f until ||grad f|| <= tol or max_iters,
// starting from x0 (zero when omitted). Ten consecutive loss increases abort
// with a DivergenceError suggesting a smaller step. Note that for the relu
// task x = 0 is a stationary point of the model (every unit sits on the
// kink), so relu solves need a nonzero start.
OptimResult centralized_optimum(const DistributedObjective& obj, double step, double tol,
                                int max_iters, const Vector* x0 = nullptr);

}  // namespace delicoco
