#include "delicoco/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "delicoco/errors.hpp"

namespace delicoco {

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "logistic") return TaskKind::logistic;
  if (s == "linear") return TaskKind::linear;
  if (s == "relu") return TaskKind::relu;
  throw ConfigError("unknown task kind: \"" + s + "\" (expected logistic|linear|relu)");
}

std::string to_string(TaskKind task) {
  switch (task) {
    case TaskKind::logistic: return "logistic";
    case TaskKind::linear: return "linear";
    case TaskKind::relu: return "relu";
  }
  return "?";
}

Partition partition_even(int m, int n) {
  if (n < 1) throw ConfigError("partition: node count must be >= 1");
  if (n > m) throw ConfigError("partition: node count exceeds sample count");
  Partition p;
  const int base = m / n;
  const int rem = m % n;
  int begin = 0;
  for (int i = 0; i < n; ++i) {
    const int size = base + (i < rem ? 1 : 0);
    p.node_ranges.emplace_back(begin, begin + size);
    begin += size;
  }
  return p;
}

Partition partition_sorted(Dataset& dataset, int n) {
  const int m = dataset.sample_count();
  if (n > m) throw ConfigError("partition: node count exceeds sample count");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&dataset](int a, int b) { return dataset.labels[a] < dataset.labels[b]; });

  Matrix feats(m, dataset.dim());
  Vector labels(m);
  for (int r = 0; r < m; ++r) {
    const double* src = dataset.features.row_ptr(order[r]);
    std::copy(src, src + dataset.dim(), feats.row_ptr(r));
    labels[r] = dataset.labels[order[r]];
  }
  dataset.features = std::move(feats);
  dataset.labels = std::move(labels);
  return partition_even(m, n);
}

DistributedObjective make_objective(Dataset dataset, Partition partition, double l2) {
  if (l2 < 0.0) throw ConfigError("l2 regularization must be nonnegative");
  DistributedObjective obj;
  obj.n = partition.node_count();
  obj.dataset = std::move(dataset);
  obj.partition = std::move(partition);
  obj.l2 = l2;
  if (obj.partition.node_ranges.empty() ||
      obj.partition.node_ranges.back().second != obj.dataset.sample_count())
    throw ContractViolation("objective: partition does not cover the dataset");
  return obj;
}

SynData gen_syn1(SeededRng& rng, int m, int d, double noise_var) {
  if (m < 1 || d < 1) throw ConfigError("gen_syn1: m and d must be >= 1");
  if (noise_var < 0.0) throw ConfigError("gen_syn1: noise variance must be nonnegative");
  SynData out;
  out.theta_star.resize(d);
  for (double& x : out.theta_star) x = rng.next_gaussian();
  out.dataset.features = randn(rng, m, d);
  out.dataset.labels.resize(m);
  const double noise_std = std::sqrt(noise_var);
  for (int i = 0; i < m; ++i) {
    double y = 0.0;
    const double* row = out.dataset.features.row_ptr(i);
    for (int j = 0; j < d; ++j) y += row[j] * out.theta_star[j];
    if (noise_std > 0.0) y += noise_std * rng.next_gaussian();
    out.dataset.labels[i] = y;
  }
  out.dataset.task = TaskKind::linear;
  return out;
}

SynData gen_syn2(SeededRng& rng, int m, int d, double noise_var) {
  if (m < 1 || d < 1) throw ConfigError("gen_syn2: m and d must be >= 1");
  if (noise_var < 0.0) throw ConfigError("gen_syn2: noise variance must be nonnegative");
  SynData out;
  out.theta_star.resize(d);
  for (double& x : out.theta_star) x = rng.next_gaussian();
  out.dataset.features = randn(rng, m, d);
  out.dataset.labels.resize(m);
  const double noise_std = std::sqrt(noise_var);
  for (int i = 0; i < m; ++i) {
    double z = 0.0;
    const double* row = out.dataset.features.row_ptr(i);
    for (int j = 0; j < d; ++j) z += row[j] * out.theta_star[j];
    double y = std::max(z, 0.0);
    if (noise_std > 0.0) y += noise_std * rng.next_gaussian();
    out.dataset.labels[i] = y;
  }
  out.dataset.task = TaskKind::relu;
  return out;
}

namespace {

std::uint32_t read_be_u32(std::ifstream& f, const std::string& path, long offset) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  if (!f)
    throw IoError("truncated IDX file " + path + " at offset " + std::to_string(offset));
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Dataset load_mnist_binary(const std::string& image_path, const std::string& label_path) {
  std::ifstream img(image_path, std::ios::binary);
  if (!img) throw IoError("cannot open image file " + image_path);
  const std::uint32_t img_magic = read_be_u32(img, image_path, 0);
  if (img_magic != 0x00000803)
    throw IoError("bad magic number in " + image_path + " at offset 0 (expected 2051, got " +
                  std::to_string(img_magic) + ")");
  const std::uint32_t count = read_be_u32(img, image_path, 4);
  const std::uint32_t rows = read_be_u32(img, image_path, 8);
  const std::uint32_t cols = read_be_u32(img, image_path, 12);

  std::ifstream lab(label_path, std::ios::binary);
  if (!lab) throw IoError("cannot open label file " + label_path);
  const std::uint32_t lab_magic = read_be_u32(lab, label_path, 0);
  if (lab_magic != 0x00000801)
    throw IoError("bad magic number in " + label_path + " at offset 0 (expected 2049, got " +
                  std::to_string(lab_magic) + ")");
  const std::uint32_t lab_count = read_be_u32(lab, label_path, 4);
  if (count != lab_count)
    throw IoError("image count " + std::to_string(count) + " in " + image_path +
                  " does not match label count " + std::to_string(lab_count) + " in " + label_path);

  const int m = static_cast<int>(count);
  const int d = static_cast<int>(rows * cols);
  if (m < 1 || d < 1) throw IoError("IDX file " + image_path + " declares an empty dataset");

  Dataset ds;
  ds.task = TaskKind::logistic;
  ds.features = Matrix(m, d);
  ds.labels.resize(m);

  std::vector<unsigned char> buf(static_cast<size_t>(d));
  for (int i = 0; i < m; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), d);
    if (!img)
      throw IoError("truncated IDX file " + image_path + " at offset " +
                    std::to_string(16L + static_cast<long>(i) * d));
    double* row = ds.features.row_ptr(i);
    for (int j = 0; j < d; ++j) row[j] = buf[j] / 255.0;
  }
  for (int i = 0; i < m; ++i) {
    unsigned char y;
    lab.read(reinterpret_cast<char*>(&y), 1);
    if (!lab)
      throw IoError("truncated IDX file " + label_path + " at offset " + std::to_string(8L + i));
    ds.labels[i] = y < 5 ? 0.0 : 1.0;
  }
  return ds;
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  for (int j = 0; j < dataset.dim(); ++j) f << "f" << j << ",";
  f << "label\n";
  char buf[32];
  for (int i = 0; i < dataset.sample_count(); ++i) {
    const double* row = dataset.features.row_ptr(i);
    for (int j = 0; j < dataset.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      f << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", dataset.labels[i]);
    f << buf << "\n";
  }
  if (!f) throw IoError("write failed for " + path);
}

Dataset load_dataset_csv(const std::string& path, TaskKind task) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw IoError("empty dataset file " + path);
  const int d = static_cast<int>(std::count(line.begin(), line.end(), ','));
  std::vector<double> values;
  int m = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++col;
    }
    if (col != d + 1) throw IoError("row " + std::to_string(m + 2) + " of " + path +
                                    " has " + std::to_string(col) + " columns, expected " +
                                    std::to_string(d + 1));
    ++m;
  }
  if (m == 0) throw IoError("dataset file " + path + " has no data rows");
  Dataset ds;
  ds.task = task;
  ds.features = Matrix(m, d);
  ds.labels.resize(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) ds.features(i, j) = values[static_cast<size_t>(i) * (d + 1) + j];
    ds.labels[i] = values[static_cast<size_t>(i) * (d + 1) + d];
  }
  return ds;
}

namespace {

// log(1 + exp(z)) without overflow.
double log1p_exp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_node_and_dim(const DistributedObjective& obj, int node, const Vector& x) {
  if (node < 0 || node >= obj.n) throw ContractViolation("node index out of range");
  if (static_cast<int>(x.size()) != obj.dataset.dim())
    throw ContractViolation("parameter dimension does not match feature dimension");
}

}  // namespace

double local_loss(const DistributedObjective& obj, int node, const Vector& x) {
  check_node_and_dim(obj, node, x);
  const auto [begin, end] = obj.partition.node_ranges[node];
  const int ni = end - begin;
  const int d = obj.dataset.dim();
  double acc = 0.0;
  for (int r = begin; r < end; ++r) {
    const double* a = obj.dataset.features.row_ptr(r);
    double z = 0.0;
    for (int j = 0; j < d; ++j) z += a[j] * x[j];
    const double y = obj.dataset.labels[r];
    switch (obj.dataset.task) {
      case TaskKind::linear: {
        const double res = z - y;
        acc += 0.5 * res * res;
        break;
      }
      case TaskKind::relu: {
        const double res = std::max(z, 0.0) - y;
        acc += 0.5 * res * res;
        break;
      }
      case TaskKind::logistic:
        acc += log1p_exp(z) - y * z;
        break;
    }
  }
  return acc / ni + 0.5 * obj.l2 * norm_sq(x);
}

Vector local_grad(const DistributedObjective& obj, int node, const Vector& x) {
  check_node_and_dim(obj, node, x);
  const auto [begin, end] = obj.partition.node_ranges[node];
  const int ni = end - begin;
  const int d = obj.dataset.dim();
  Vector g(x.size(), 0.0);
  for (int r = begin; r < end; ++r) {
    const double* a = obj.dataset.features.row_ptr(r);
    double z = 0.0;
    for (int j = 0; j < d; ++j) z += a[j] * x[j];
    const double y = obj.dataset.labels[r];
    double coeff = 0.0;
    switch (obj.dataset.task) {
      case TaskKind::linear:
        coeff = z - y;
        break;
      case TaskKind::relu:
        // Subgradient 0 at the kink.
        coeff = z > 0.0 ? (z - y) : 0.0;
        break;
      case TaskKind::logistic:
        coeff = sigmoid(z) - y;
        break;
    }
    if (coeff != 0.0)
      for (int j = 0; j < d; ++j) g[j] += coeff * a[j];
  }
  for (int j = 0; j < d; ++j) g[j] = g[j] / ni + obj.l2 * x[j];
  return g;
}

double global_loss(const DistributedObjective& obj, const Vector& x) {
  double acc = 0.0;
  for (int i = 0; i < obj.n; ++i) acc += local_loss(obj, i, x);
  return acc;
}

Vector global_grad(const DistributedObjective& obj, const Vector& x) {
  Vector g(x.size(), 0.0);
  for (int i = 0; i < obj.n; ++i) {
    const Vector gi = local_grad(obj, i, x);
    for (size_t j = 0; j < g.size(); ++j) g[j] += gi[j];
  }
  return g;
}

OptimResult centralized_optimum(const DistributedObjective& obj, double step, double tol,
                                int max_iters, const Vector* x0) {
  if (step <= 0.0) throw ConfigError("centralized_optimum: step must be positive");
  if (tol <= 0.0) throw ConfigError("centralized_optimum: tol must be positive");
  OptimResult res;
  if (x0 != nullptr) {
    if (static_cast<int>(x0->size()) != obj.dataset.dim())
      throw ContractViolation("centralized_optimum: start point dimension mismatch");
    res.x_star = *x0;
  } else {
    res.x_star.assign(obj.dataset.dim(), 0.0);
  }
  double loss = global_loss(obj, res.x_star);
  int increases = 0;
  for (int t = 0; t < max_iters; ++t) {
    Vector g = global_grad(obj, res.x_star);
    res.grad_norm = std::sqrt(norm_sq(g));
    if (res.grad_norm <= tol) {
      res.tol_met = true;
      break;
    }
    for (size_t j = 0; j < res.x_star.size(); ++j) res.x_star[j] -= step * g[j];
    const double next_loss = global_loss(obj, res.x_star);
    if (!std::isfinite(next_loss))
      throw DivergenceError("centralized gradient descent diverged (non-finite loss); try a smaller step", t + 1);
    increases = next_loss > loss ? increases + 1 : 0;
    if (increases >= 10)
      throw DivergenceError("centralized gradient descent loss increased 10 times in a row; try a smaller step", t + 1);
    loss = next_loss;
    res.iters = t + 1;
  }
  res.f_star = global_loss(obj, res.x_star);
  if (!res.tol_met) {
    Vector g = global_grad(obj, res.x_star);
    res.grad_norm = std::sqrt(norm_sq(g));
    res.tol_met = res.grad_norm <= tol;
  }
  return res;
}

}  // namespace delicoco
