#include "delicoco/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "delicoco/errors.hpp"

namespace delicoco {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw ContractViolation("matmul: inner dimensions differ");
  Matrix out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row_ptr(i);
    double* orow = out.row_ptr(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Vector matvec(const Matrix& a, const Vector& v) {
  if (a.cols != static_cast<int>(v.size())) throw ContractViolation("matvec: dimension mismatch");
  Vector out(a.rows, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    const double* row = a.row_ptr(i);
    double acc = 0.0;
    for (int j = 0; j < a.cols; ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

Vector get_col(const Matrix& m, int c) {
  Vector v(m.rows);
  for (int r = 0; r < m.rows; ++r) v[r] = m(r, c);
  return v;
}

void set_col(Matrix& m, int c, const Vector& v) {
  if (static_cast<int>(v.size()) != m.rows) throw ContractViolation("set_col: length mismatch");
  for (int r = 0; r < m.rows; ++r) m(r, c) = v[r];
}

Vector col_mean(const Matrix& m) {
  Vector mean(m.rows, 0.0);
  for (int r = 0; r < m.rows; ++r) {
    const double* row = m.row_ptr(r);
    double acc = 0.0;
    for (int c = 0; c < m.cols; ++c) acc += row[c];
    mean[r] = acc / m.cols;
  }
  return mean;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ContractViolation("dot: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm_sq(const Vector& v) { return dot(v, v); }

double frob_norm_sq(const Matrix& m) {
  double acc = 0.0;
  for (double x : m.data) acc += x * x;
  return acc;
}

namespace {

double max_abs_entry(const Matrix& m) {
  double mx = 0.0;
  for (double x : m.data) mx = std::max(mx, std::fabs(x));
  return mx;
}

}  // namespace

std::vector<double> eig_sym(const Matrix& m) {
  if (m.rows != m.cols) throw ContractViolation("eig_sym: matrix is not square");
  const int n = m.rows;
  const double scale = max_abs_entry(m);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(m(i, j) - m(j, i)) > 1e-12 * std::max(1.0, scale))
        throw ContractViolation("eig_sym: matrix is not symmetric");

  // Work on a copy; cyclic Jacobi sweeps annihilate off-diagonal entries.
  Matrix a = m;
  const double frob = std::sqrt(frob_norm_sq(a));
  const double tol = 1e-14 * std::max(1.0, frob);
  const int max_sweeps = 100;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= tol) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= tol / (n * n)) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = arp - s * (arq + tau * arp);
          a(p, r) = a(r, p);
          a(r, q) = arq + s * (arp - tau * arq);
          a(q, r) = a(r, q);
        }
      }
    }
  }

  std::vector<double> eigs(n);
  for (int i = 0; i < n; ++i) eigs[i] = a(i, i);
  std::sort(eigs.begin(), eigs.end(), [](double x, double y) {
    const double ax = std::fabs(x), ay = std::fabs(y);
    if (ax != ay) return ax > ay;
    return x > y;
  });
  return eigs;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (int i = 0; i < 4; ++i) state_[i] = splitmix64(sm);
  // xoshiro must not start from the all-zero state; splitmix64 makes this
  // astronomically unlikely but the guard costs nothing.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t SeededRng::fold_seed(std::uint64_t seed, std::uint64_t id) {
  std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ULL * (id + 1));
  return splitmix64(sm);
}

SeededRng SeededRng::substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = master_seed;
  for (std::uint64_t id : path) s = fold_seed(s, id);
  return SeededRng(s);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_gaussian_ = r * std::sin(angle);
  has_cached_gaussian_ = true;
  return r * std::cos(angle);
}

Matrix randn(SeededRng& rng, int rows, int cols) {
  if (rows < 1 || cols < 1) throw ContractViolation("randn: rows and cols must be >= 1");
  Matrix m(rows, cols);
  for (double& x : m.data) x = rng.next_gaussian();
  return m;
}

}  // namespace delicoco
