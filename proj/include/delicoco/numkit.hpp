#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace delicoco {

using Vector = std::vector<double>;

// Dense row-major matrix. Small and boring on purpose: every problem in
// this toolkit fits comfortably in a few megabytes of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  static Matrix zeros(int r, int c) { return Matrix(r, c); }
  static Matrix identity(int n);

  const double* row_ptr(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
  double* row_ptr(int r) { return data.data() + static_cast<size_t>(r) * cols; }
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& v);

Vector get_col(const Matrix& m, int c);
void set_col(Matrix& m, int c, const Vector& v);
// Mean of the columns of m (length m.rows).
Vector col_mean(const Matrix& m);

double dot(const Vector& a, const Vector& b);
double norm_sq(const Vector& v);
double frob_norm_sq(const Matrix& m);

// Eigenvalues of a symmetric matrix via the cyclic Jacobi rotation method,
// returned in descending order of absolute value (ties: larger value first).
// Input must be square and symmetric to 1e-12 relative tolerance; throws
// ContractViolation otherwise.
std::vector<double> eig_sym(const Matrix& m);

// splitmix64 step, used for seeding and sub-stream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic PRNG (xoshiro256**, seeded through splitmix64). The same
// seed always yields the same stream. Independent sub-streams for distinct
// purposes are derived from a master seed with `substream`, which folds a
// path of ids into the seed one splitmix64 step per id:
//
//   s_0 = master, s_{k+1} = splitmix64(s_k xor (0x9E3779B97F4A7C15 * (id_k + 1)))
//
// so substream(seed, {a, b}) != substream(seed, {b, a}) and every (purpose,
// index...) tuple names one reproducible stream.
class SeededRng {
 public:
  static constexpr const char* kAlgorithm = "xoshiro256starstar";

  explicit SeededRng(std::uint64_t seed);

  static std::uint64_t fold_seed(std::uint64_t seed, std::uint64_t id);
  static SeededRng substream(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  // Uniform double in [0, 1), 53 random bits.
  double next_unit();
  // Standard normal via Box-Muller; both outputs of each transform are
  // consumed (the second is cached for the next call).
  double next_gaussian();

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

// Fixed sub-stream ids off a run's master seed.
namespace streams {
inline constexpr std::uint64_t kData = 1;         // dataset generation
inline constexpr std::uint64_t kCompression = 2;  // per (t, q, node) compressor draws
inline constexpr std::uint64_t kRepeat = 3;       // seed variation across --repeats
inline constexpr std::uint64_t kSweep = 4;        // seed variation across sweep values
inline constexpr std::uint64_t kInit = 5;         // nonzero start point for relu tasks
}  // namespace streams

// rows x cols matrix of i.i.d. standard normal samples, filled row-major.
Matrix randn(SeededRng& rng, int rows, int cols);

}  // namespace delicoco
