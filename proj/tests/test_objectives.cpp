#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "delicoco/errors.hpp"
#include "delicoco/objectives.hpp"

using namespace delicoco;

namespace {

DistributedObjective small_objective(TaskKind task, int m, int d, int n, double l2,
                                     std::uint64_t seed) {
  SeededRng rng(seed);
  Dataset ds;
  ds.task = task;
  ds.features = randn(rng, m, d);
  ds.labels.resize(m);
  for (int i = 0; i < m; ++i) {
    const double z = rng.next_gaussian();
    ds.labels[i] = task == TaskKind::logistic ? (z > 0 ? 1.0 : 0.0) : z;
  }
  return make_objective(std::move(ds), partition_even(m, n), l2);
}

// Central finite differences of the local loss, the independent oracle for
// local_grad.
Vector fd_local_grad(const DistributedObjective& obj, int node, const Vector& x, double h) {
  Vector g(x.size());
  Vector probe = x;
  for (size_t j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = local_loss(obj, node, probe);
    probe[j] = x[j] - h;
    const double down = local_loss(obj, node, probe);
    probe[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

// Skip probes that sit numerically on the relu kink.
bool near_relu_kink(const DistributedObjective& obj, const Vector& x) {
  if (obj.dataset.task != TaskKind::relu) return false;
  for (int r = 0; r < obj.dataset.sample_count(); ++r) {
    double z = 0.0;
    const double* a = obj.dataset.features.row_ptr(r);
    for (size_t j = 0; j < x.size(); ++j) z += a[j] * x[j];
    if (std::fabs(z) < 1e-4) return true;
  }
  return false;
}

std::string temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "delicoco_obj_tests";
  std::filesystem::create_directories(dir);
  return dir.string();
}

void write_be_u32(std::ofstream& f, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v)};
  f.write(reinterpret_cast<const char*>(b), 4);
}

void write_idx_images(const std::string& path, const std::vector<unsigned char>& pixels,
                      int count, int rows, int cols, std::uint32_t magic = 0x00000803) {
  std::ofstream f(path, std::ios::binary);
  write_be_u32(f, magic);
  write_be_u32(f, count);
  write_be_u32(f, rows);
  write_be_u32(f, cols);
  f.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::string& path, const std::vector<unsigned char>& labels,
                      std::uint32_t magic = 0x00000801) {
  std::ofstream f(path, std::ios::binary);
  write_be_u32(f, magic);
  write_be_u32(f, static_cast<std::uint32_t>(labels.size()));
  f.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

}  // namespace

TEST_CASE("partition_even: near-equal contiguous cover") {
  const Partition p = partition_even(60000, 9);
  int covered = 0;
  int min_size = 1 << 30, max_size = 0;
  for (int i = 0; i < 9; ++i) {
    CHECK(p.node_ranges[i].first == covered);
    covered = p.node_ranges[i].second;
    min_size = std::min(min_size, p.node_size(i));
    max_size = std::max(max_size, p.node_size(i));
  }
  CHECK(covered == 60000);
  CHECK(min_size == 6666);
  CHECK(max_size == 6667);
}

TEST_CASE("partition_sorted: binary labels separate, at most one mixed node") {
  SeededRng rng(5);
  Dataset ds;
  ds.task = TaskKind::logistic;
  const int m = 1000;
  ds.features = randn(rng, m, 3);
  ds.labels.resize(m);
  for (int i = 0; i < m; ++i) ds.labels[i] = (rng.next_unit() < 0.42) ? 0.0 : 1.0;

  const Partition p = partition_sorted(ds, 9);
  int mixed = 0;
  for (int i = 0; i < 9; ++i) {
    const auto [b, e] = p.node_ranges[i];
    const bool has0 = std::any_of(ds.labels.begin() + b, ds.labels.begin() + e,
                                  [](double y) { return y == 0.0; });
    const bool has1 = std::any_of(ds.labels.begin() + b, ds.labels.begin() + e,
                                  [](double y) { return y == 1.0; });
    mixed += has0 && has1;
  }
  CHECK(mixed <= 1);
  CHECK(std::is_sorted(ds.labels.begin(), ds.labels.end()));
}

TEST_CASE("partition_sorted: simple four-sample example") {
  Dataset ds;
  ds.task = TaskKind::logistic;
  ds.features = Matrix(4, 1);
  for (int i = 0; i < 4; ++i) ds.features(i, 0) = i;
  ds.labels = {1, 0, 1, 0};
  const Partition p = partition_sorted(ds, 2);
  CHECK(ds.labels == Vector{0, 0, 1, 1});
  // Stable: original rows 1, 3 first, then 0, 2.
  CHECK(ds.features(0, 0) == 1.0);
  CHECK(ds.features(1, 0) == 3.0);
  CHECK(p.node_ranges[0] == std::pair<int, int>{0, 2});
}

TEST_CASE("partition_sorted: constant labels degrade to even split") {
  Dataset ds;
  ds.task = TaskKind::linear;
  ds.features = Matrix(10, 1);
  ds.labels.assign(10, 3.5);
  const Partition p = partition_sorted(ds, 3);
  CHECK(p.node_size(0) == 4);
  CHECK(p.node_size(1) == 3);
  CHECK(p.node_size(2) == 3);
}

TEST_CASE("partition rejects more nodes than samples") {
  CHECK_THROWS_AS(partition_even(3, 5), ConfigError);
}

TEST_CASE("gen_syn1: noiseless data interpolates at theta_star") {
  SeededRng rng(11);
  const SynData syn = gen_syn1(rng, 50, 10, 0.0);
  for (int i = 0; i < 50; ++i) {
    double z = 0.0;
    for (int j = 0; j < 10; ++j) z += syn.dataset.features(i, j) * syn.theta_star[j];
    CHECK(z == doctest::Approx(syn.dataset.labels[i]).epsilon(1e-12));
  }
  CHECK(syn.dataset.task == TaskKind::linear);
}

TEST_CASE("gen_syn1/gen_syn2: deterministic for a fixed seed") {
  SeededRng a(21), b(21);
  const SynData s1 = gen_syn1(a, 30, 4, 0.05);
  const SynData s2 = gen_syn1(b, 30, 4, 0.05);
  REQUIRE(s1.dataset.features.data == s2.dataset.features.data);
  REQUIRE(s1.dataset.labels == s2.dataset.labels);
  REQUIRE(s1.theta_star == s2.theta_star);

  SeededRng c(22), e(22);
  const SynData s3 = gen_syn2(c, 30, 4, 0.05);
  const SynData s4 = gen_syn2(e, 30, 4, 0.05);
  REQUIRE(s3.dataset.labels == s4.dataset.labels);
}

TEST_CASE("gen_syn2: relu clamps negative responses, noiseless") {
  SeededRng rng(31);
  const SynData syn = gen_syn2(rng, 200, 6, 0.0);
  int clamped = 0;
  for (int i = 0; i < 200; ++i) {
    double z = 0.0;
    for (int j = 0; j < 6; ++j) z += syn.dataset.features(i, j) * syn.theta_star[j];
    if (z < 0.0) {
      CHECK(syn.dataset.labels[i] == 0.0);
      ++clamped;
    } else {
      CHECK(syn.dataset.labels[i] == doctest::Approx(z).epsilon(1e-12));
    }
  }
  CHECK(clamped > 0);  // about half the samples
  CHECK(syn.dataset.task == TaskKind::relu);
}

TEST_CASE("local_grad: hand-checked single-sample cases") {
  // logistic, a=[1,0], y=1, x=0: gradient (sigma(0) - 1) * a = [-0.5, 0]
  Dataset ds;
  ds.task = TaskKind::logistic;
  ds.features = Matrix(1, 2);
  ds.features(0, 0) = 1.0;
  ds.labels = {1.0};
  auto obj = make_objective(ds, partition_even(1, 1), 0.0);
  Vector g = local_grad(obj, 0, {0.0, 0.0});
  CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.0));

  // linear, a=[1,2], y=3, x=[1,1]: zero residual
  Dataset dl;
  dl.task = TaskKind::linear;
  dl.features = Matrix(1, 2);
  dl.features(0, 0) = 1.0;
  dl.features(0, 1) = 2.0;
  dl.labels = {3.0};
  auto objl = make_objective(dl, partition_even(1, 1), 0.0);
  g = local_grad(objl, 0, {1.0, 1.0});
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(0.0));

  // relu, a=[1], y=0, x=[-2]: inactive unit, zero subgradient
  Dataset dr;
  dr.task = TaskKind::relu;
  dr.features = Matrix(1, 1);
  dr.features(0, 0) = 1.0;
  dr.labels = {0.0};
  auto objr = make_objective(dr, partition_even(1, 1), 0.0);
  g = local_grad(objr, 0, {-2.0});
  CHECK(g[0] == 0.0);
}

TEST_CASE("local_grad matches central finite differences on random probes") {
  SeededRng probe_rng(41);
  for (TaskKind task : {TaskKind::logistic, TaskKind::linear, TaskKind::relu}) {
    const auto obj = small_objective(task, 24, 5, 3, 0.01, 500 + static_cast<int>(task));
    int checked = 0;
    while (checked < 30) {
      Vector x(5);
      for (double& v : x) v = 0.7 * probe_rng.next_gaussian();
      if (near_relu_kink(obj, x)) continue;
      ++checked;
      for (int node = 0; node < 3; ++node) {
        const Vector g = local_grad(obj, node, x);
        const Vector fd = fd_local_grad(obj, node, x, 1e-6);
        for (size_t j = 0; j < g.size(); ++j)
          CHECK(g[j] == doctest::Approx(fd[j]).epsilon(1e-5).scale(1.0));
      }
    }
  }
}

TEST_CASE("global_loss: directional derivative matches the summed gradient") {
  SeededRng rng(51);
  const auto obj = small_objective(TaskKind::linear, 30, 6, 5, 0.001, 61);
  for (int rep = 0; rep < 10; ++rep) {
    Vector x(6), v(6);
    for (double& z : x) z = rng.next_gaussian();
    for (double& z : v) z = rng.next_gaussian();
    const double h = 1e-6;
    Vector up = x, down = x;
    for (int j = 0; j < 6; ++j) {
      up[j] += h * v[j];
      down[j] -= h * v[j];
    }
    const double fd = (global_loss(obj, up) - global_loss(obj, down)) / (2.0 * h);
    CHECK(fd == doctest::Approx(dot(global_grad(obj, x), v)).epsilon(1e-5));
  }
}

TEST_CASE("global_loss: sums per-node losses; two identical nodes double one") {
  Dataset ds;
  ds.task = TaskKind::linear;
  ds.features = Matrix(2, 2);
  ds.features(0, 0) = 1.0;
  ds.features(1, 0) = 1.0;  // identical samples
  ds.labels = {2.0, 2.0};
  const auto obj2 = make_objective(ds, partition_even(2, 2), 0.0);
  const auto obj1 = make_objective(ds, partition_even(2, 1), 0.0);
  const Vector x{0.5, -1.0};
  CHECK(global_loss(obj2, x) == doctest::Approx(2.0 * local_loss(obj2, 0, x)).epsilon(1e-14));
  CHECK(global_loss(obj2, x) == doctest::Approx(2.0 * global_loss(obj1, x)).epsilon(1e-14));
}

TEST_CASE("global_loss invariant to partition when l2=0 and node sizes equal") {
  SeededRng rng(71);
  Dataset ds;
  ds.task = TaskKind::linear;
  ds.features = randn(rng, 24, 4);
  ds.labels.resize(24);
  for (double& y : ds.labels) y = rng.next_gaussian();

  Vector x(4);
  for (double& v : x) v = rng.next_gaussian();

  Dataset sorted_copy = ds;
  const auto obj_even = make_objective(ds, partition_even(24, 4), 0.0);
  const Partition ps = partition_sorted(sorted_copy, 4);
  const auto obj_sorted = make_objective(sorted_copy, ps, 0.0);
  CHECK(global_loss(obj_even, x) == doctest::Approx(global_loss(obj_sorted, x)).epsilon(1e-12));
}

TEST_CASE("centralized_optimum: scalar quadratic lands on the minimizer") {
  // f(x) = (x - 1)^2 via two duplicated linear samples a=1, y=1 and l2=0:
  // per-sample loss 0.5 (x - 1)^2, two nodes -> f = (x - 1)^2.
  Dataset ds;
  ds.task = TaskKind::linear;
  ds.features = Matrix(2, 1);
  ds.features(0, 0) = 1.0;
  ds.features(1, 0) = 1.0;
  ds.labels = {1.0, 1.0};
  const auto obj = make_objective(ds, partition_even(2, 2), 0.0);
  const OptimResult res = centralized_optimum(obj, 0.5, 1e-10, 10000);
  CHECK(res.tol_met);
  CHECK(res.x_star[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.f_star == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("centralized_optimum: noiseless overdetermined system reaches ~zero loss") {
  SeededRng rng(81);
  const SynData syn = gen_syn1(rng, 60, 12, 0.0);
  const auto obj = make_objective(syn.dataset, partition_even(60, 4), 0.0);
  const OptimResult res = centralized_optimum(obj, 0.02, 1e-10, 50000);
  CHECK(res.tol_met);
  CHECK(res.f_star <= 1e-15);
}

TEST_CASE("centralized_optimum: returned value is optimal against random probes") {
  SeededRng rng(91);
  const auto obj = small_objective(TaskKind::linear, 40, 5, 4, 0.01, 92);
  const OptimResult res = centralized_optimum(obj, 0.05, 1e-10, 50000);
  REQUIRE(res.tol_met);
  for (int rep = 0; rep < 100; ++rep) {
    Vector x(5);
    for (double& v : x) v = 2.0 * rng.next_gaussian();
    CHECK(res.f_star <= global_loss(obj, x) + 1e-12);
  }
}

TEST_CASE("centralized_optimum: diverging step reports a diagnostic") {
  const auto obj = small_objective(TaskKind::linear, 40, 5, 4, 0.0, 93);
  CHECK_THROWS_AS(centralized_optimum(obj, 50.0, 1e-10, 1000), DivergenceError);
}

TEST_CASE("load_mnist_binary: label mapping and pixel scaling") {
  const std::string dir = temp_dir();
  const std::string img = dir + "/ok-images", lab = dir + "/ok-labels";
  // Three 2x2 images.
  write_idx_images(img, {0, 128, 255, 64, 10, 20, 30, 40, 50, 60, 70, 80}, 3, 2, 2);
  write_idx_labels(lab, {3, 7, 4});
  const Dataset ds = load_mnist_binary(img, lab);
  CHECK(ds.sample_count() == 3);
  CHECK(ds.dim() == 4);
  CHECK(ds.labels == Vector{0.0, 1.0, 0.0});
  CHECK(ds.features(0, 1) == doctest::Approx(128.0 / 255.0));
  CHECK(ds.features(0, 2) == doctest::Approx(1.0));
  CHECK(ds.task == TaskKind::logistic);
}

TEST_CASE("load_mnist_binary: bad magic names the file and offset") {
  const std::string dir = temp_dir();
  const std::string img = dir + "/badmagic-images", lab = dir + "/badmagic-labels";
  write_idx_images(img, {0, 0, 0, 0}, 1, 2, 2, 0x00000999);
  write_idx_labels(lab, {1});
  CHECK_THROWS_WITH_AS(load_mnist_binary(img, lab), doctest::Contains("bad magic"), IoError);
  CHECK_THROWS_WITH_AS(load_mnist_binary(img, lab), doctest::Contains(img.c_str()), IoError);
}

TEST_CASE("load_mnist_binary: count mismatch is rejected") {
  const std::string dir = temp_dir();
  const std::string img = dir + "/mismatch-images", lab = dir + "/mismatch-labels";
  write_idx_images(img, std::vector<unsigned char>(8, 0), 2, 2, 2);
  write_idx_labels(lab, {1, 2, 3});
  CHECK_THROWS_WITH_AS(load_mnist_binary(img, lab), doctest::Contains("does not match"), IoError);
}

TEST_CASE("load_mnist_binary: truncated image payload names the offset") {
  const std::string dir = temp_dir();
  const std::string img = dir + "/trunc-images", lab = dir + "/trunc-labels";
  write_idx_images(img, {1, 2, 3}, 2, 2, 2);  // declares 2 images, ships < 8 bytes
  write_idx_labels(lab, {1, 2});
  CHECK_THROWS_WITH_AS(load_mnist_binary(img, lab), doctest::Contains("truncated"), IoError);
}

TEST_CASE("gen_syn1: full-scale instance generates with the right moments") {
  SeededRng rng(2000);
  const int m = 10000, d = 2000;
  const SynData syn = gen_syn1(rng, m, d, 0.05);
  REQUIRE(syn.dataset.sample_count() == m);
  REQUIRE(syn.dataset.dim() == d);
  // Label variance is ||theta*||^2 + noise_var; theta* ~ N(0, I_d) makes
  // that approximately d. Loose 10% band, law of large numbers.
  double mean = 0.0;
  for (double y : syn.dataset.labels) mean += y / m;
  double var = 0.0;
  for (double y : syn.dataset.labels) var += (y - mean) * (y - mean) / m;
  const double want = norm_sq(syn.theta_star) + 0.05;
  CHECK(var > 0.9 * want);
  CHECK(var < 1.1 * want);
}

TEST_CASE("dataset CSV round-trip") {
  SeededRng rng(111);
  const SynData syn = gen_syn1(rng, 12, 3, 0.05);
  const std::string path = temp_dir() + "/roundtrip.csv";
  save_dataset_csv(syn.dataset, path);
  const Dataset back = load_dataset_csv(path, TaskKind::linear);
  REQUIRE(back.sample_count() == 12);
  REQUIRE(back.dim() == 3);
  CHECK(back.features.data == syn.dataset.features.data);
  CHECK(back.labels == syn.dataset.labels);
}
