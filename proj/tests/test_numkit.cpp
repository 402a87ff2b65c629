#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "delicoco/errors.hpp"
#include "delicoco/numkit.hpp"

using namespace delicoco;

namespace {

// Independent construction oracle: A = R diag(lambda) R^T with R orthogonal
// from Gram-Schmidt over random Gaussian columns, so the spectrum of A is
// known by construction.
Matrix matrix_with_spectrum(const std::vector<double>& lambda, SeededRng& rng) {
  const int n = static_cast<int>(lambda.size());
  Matrix r(n, n);
  for (int c = 0; c < n; ++c) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
    for (int prev = 0; prev < c; ++prev) {
      double proj = 0.0;
      for (int i = 0; i < n; ++i) proj += v[i] * r(i, prev);
      for (int i = 0; i < n; ++i) v[i] -= proj * r(i, prev);
    }
    const double norm = std::sqrt(norm_sq(v));
    REQUIRE(norm > 1e-8);  // n is small, degeneracy is practically impossible
    for (int i = 0; i < n; ++i) r(i, c) = v[i] / norm;
  }
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += r(i, k) * lambda[k] * r(j, k);
      a(i, j) = acc;
    }
  // Symmetrize away the last rounding bit.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(j, i) = a(i, j) = 0.5 * (a(i, j) + a(j, i));
  return a;
}

}  // namespace

TEST_CASE("eig_sym: identity") {
  const auto eigs = eig_sym(Matrix::identity(3));
  REQUIRE(eigs.size() == 3);
  for (double e : eigs) CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig_sym: 2x2 swap matrix") {
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  const auto eigs = eig_sym(m);
  CHECK(eigs[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eigs[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("eig_sym: ring-4 gossip matrix has the circulant spectrum") {
  // Circulant of [1/3, 1/3, 0, 1/3]; eigenvalues (1 + 2 cos(2 pi k / 4)) / 3.
  Matrix m(4, 4);
  for (int i = 0; i < 4; ++i) {
    m(i, i) = 1.0 / 3.0;
    m(i, (i + 1) % 4) = 1.0 / 3.0;
    m(i, (i + 3) % 4) = 1.0 / 3.0;
  }
  std::vector<double> expected;
  for (int k = 0; k < 4; ++k) expected.push_back((1.0 + 2.0 * std::cos(2.0 * M_PI * k / 4.0)) / 3.0);
  std::sort(expected.begin(), expected.end());
  auto eigs = eig_sym(m);
  CHECK(std::fabs(eigs[0]) == doctest::Approx(1.0).epsilon(1e-12));  // |.|-descending order
  std::sort(eigs.begin(), eigs.end());
  for (int i = 0; i < 4; ++i) CHECK(eigs[i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("eig_sym: recovers constructed spectra to 1e-8") {
  SeededRng rng(2024);
  for (int n : {2, 5, 11, 20}) {
    std::vector<double> lambda(n);
    for (int i = 0; i < n; ++i) lambda[i] = 4.0 * rng.next_gaussian();
    const Matrix a = matrix_with_spectrum(lambda, rng);
    auto got = eig_sym(a);
    std::sort(lambda.begin(), lambda.end());
    std::sort(got.begin(), got.end());
    for (int i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(lambda[i]).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("eig_sym: eigenvalue sum equals trace") {
  SeededRng rng(7);
  for (int n : {3, 8, 15}) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) a(i, j) = a(j, i) = rng.next_gaussian();
    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += a(i, i);
    const auto eigs = eig_sym(a);
    double sum = 0.0;
    for (double e : eigs) sum += e;
    CHECK(sum == doctest::Approx(trace).epsilon(1e-9));
  }
}

TEST_CASE("eig_sym: rejects non-square and asymmetric input") {
  CHECK_THROWS_AS(eig_sym(Matrix(2, 3)), ContractViolation);
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 0.5;
  CHECK_THROWS_AS(eig_sym(m), ContractViolation);
}

TEST_CASE("SeededRng: identical seed reproduces the stream bit-exactly") {
  SeededRng a(123456789ULL), b(123456789ULL);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  SeededRng g1(55), g2(55);
  for (int i = 0; i < 1000; ++i) REQUIRE(g1.next_gaussian() == g2.next_gaussian());
}

TEST_CASE("SeededRng: substream paths are order-sensitive and reproducible") {
  SeededRng a = SeededRng::substream(9, {1, 2});
  SeededRng b = SeededRng::substream(9, {2, 1});
  SeededRng c = SeededRng::substream(9, {1, 2});
  CHECK(a.next_u64() != b.next_u64());
  SeededRng a2 = SeededRng::substream(9, {1, 2});
  CHECK(a2.next_u64() == c.next_u64());
}

// Golden value pinned from the generator itself (xoshiro256** seeded 42,
// Box-Muller); guards against accidental reordering of the stream.
TEST_CASE("randn: golden first sample for seed 42") {
  SeededRng rng(42);
  const Matrix m = randn(rng, 1, 1);
  CHECK(m(0, 0) == doctest::Approx(-0.30326306467873798).epsilon(1e-15));
}

TEST_CASE("randn: sample mean and variance over 1e6 draws") {
  SeededRng rng(99);
  const int total = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < total; ++i) {
    const double x = rng.next_gaussian();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / total;
  const double var = sum_sq / total - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.01);
}

TEST_CASE("randn: deterministic matrix for fixed seed") {
  SeededRng a(31), b(31);
  const Matrix ma = randn(a, 7, 5);
  const Matrix mb = randn(b, 7, 5);
  REQUIRE(ma.data == mb.data);
}

TEST_CASE("matmul and matvec basics") {
  Matrix a(2, 3);
  a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
  a(1, 0) = 4; a(1, 1) = 5; a(1, 2) = 6;
  const Vector v{1.0, 0.0, -1.0};
  const Vector av = matvec(a, v);
  CHECK(av[0] == doctest::Approx(-2.0));
  CHECK(av[1] == doctest::Approx(-2.0));

  const Matrix id = Matrix::identity(3);
  const Matrix prod = matmul(a, id);
  CHECK(prod.data == a.data);
  CHECK_THROWS_AS(matmul(a, Matrix(2, 2)), ContractViolation);
}
