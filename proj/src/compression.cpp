#include "delicoco/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "delicoco/errors.hpp"

namespace delicoco {

CompressorSpec parse_compressor(const std::string& s) {
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon);
  CompressorSpec spec;
  if (name == "identity") {
    if (colon != std::string::npos) throw ConfigError("compressor \"identity\" takes no parameter");
    spec.kind = CompressorKind::identity;
    spec.param = 1.0;
    return spec;
  }
  if (colon == std::string::npos || colon + 1 >= s.size())
    throw ConfigError("compressor \"" + s + "\": expected kind:param");
  double param = 0.0;
  try {
    size_t used = 0;
    param = std::stod(s.substr(colon + 1), &used);
    if (used != s.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("compressor \"" + s + "\": parameter is not a number");
  }
  if (name == "top") spec.kind = CompressorKind::top_k;
  else if (name == "rand") spec.kind = CompressorKind::rand_k;
  else if (name == "rand2") spec.kind = CompressorKind::rand2;
  else if (name == "qsgd") spec.kind = CompressorKind::qsgd;
  else throw ConfigError("unknown compressor kind: \"" + name + "\"");
  spec.param = param;
  validate_compressor(spec);
  return spec;
}

namespace {

std::string format_param(double p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

}  // namespace

std::string to_string(const CompressorSpec& spec) {
  switch (spec.kind) {
    case CompressorKind::identity: return "identity";
    case CompressorKind::top_k: return "top:" + format_param(spec.param);
    case CompressorKind::rand_k: return "rand:" + format_param(spec.param);
    case CompressorKind::rand2: return "rand2:" + format_param(spec.param);
    case CompressorKind::qsgd: return "qsgd:" + format_param(spec.param);
  }
  return "?";
}

void validate_compressor(const CompressorSpec& spec) {
  switch (spec.kind) {
    case CompressorKind::identity:
      return;
    case CompressorKind::top_k:
    case CompressorKind::rand_k:
      if (!(spec.param > 0.0 && spec.param <= 1.0))
        throw ConfigError("sparsifier fraction must be in (0, 1], got " + format_param(spec.param));
      return;
    case CompressorKind::rand2:
      if (!(spec.param > 0.0 && spec.param <= 1.0))
        throw ConfigError("rand2 probability must be in (0, 1], got " + format_param(spec.param));
      return;
    case CompressorKind::qsgd:
      if (!(spec.param > 0.0))
        throw ConfigError("qsgd bit width must be positive, got " + format_param(spec.param));
      return;
  }
}

int sparsifier_k(double fraction, int d) {
  const int k = static_cast<int>(std::lround(fraction * d));
  return std::clamp(k, 1, d);
}

double omega_of(const CompressorSpec& spec, int d) {
  if (d < 1) throw ConfigError("omega_of: dimension must be >= 1");
  validate_compressor(spec);
  switch (spec.kind) {
    case CompressorKind::identity:
      return 1.0;
    case CompressorKind::top_k:
    case CompressorKind::rand_k:
      return static_cast<double>(sparsifier_k(spec.param, d)) / d;
    case CompressorKind::rand2:
      return spec.param;
    case CompressorKind::qsgd: {
      const double levels = std::pow(2.0, spec.param);
      const double w = 1.0 + std::min(std::sqrt(static_cast<double>(d)) / levels,
                                      static_cast<double>(d) / (levels * levels));
      return 1.0 / w;
    }
  }
  return 1.0;
}

namespace {

Vector compress_top_k(const Vector& x, int k) {
  const int d = static_cast<int>(x.size());
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  // Largest magnitudes first; ties keep the lowest index.
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&x](int a, int b) {
    const double ma = std::fabs(x[a]), mb = std::fabs(x[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  Vector out(x.size(), 0.0);
  for (int i = 0; i < k; ++i) out[idx[i]] = x[idx[i]];
  return out;
}

Vector compress_rand_k(const Vector& x, int k, SeededRng& rng) {
  const int d = static_cast<int>(x.size());
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(d - i));
    std::swap(idx[i], idx[j]);
  }
  Vector out(x.size(), 0.0);
  for (int i = 0; i < k; ++i) out[idx[i]] = x[idx[i]];
  return out;
}

Vector compress_qsgd(const Vector& x, double bits, SeededRng& rng) {
  const int d = static_cast<int>(x.size());
  const double norm = std::sqrt(norm_sq(x));
  if (norm == 0.0) return Vector(x.size(), 0.0);
  const double levels = std::pow(2.0, bits);
  const double w = 1.0 + std::min(std::sqrt(static_cast<double>(d)) / levels,
                                  static_cast<double>(d) / (levels * levels));
  Vector out(x.size(), 0.0);
  for (int i = 0; i < d; ++i) {
    const double u = rng.next_unit();
    const double level = std::floor(levels * std::fabs(x[i]) / norm + u);
    const double sign = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    out[i] = sign * norm / (levels * w) * level;
  }
  return out;
}

}  // namespace

Vector compress(const CompressorSpec& spec, const Vector& x, SeededRng& rng) {
  validate_compressor(spec);
  const int d = static_cast<int>(x.size());
  if (d == 0) throw ContractViolation("compress: empty vector");
  switch (spec.kind) {
    case CompressorKind::identity:
      return x;
    case CompressorKind::top_k:
      return compress_top_k(x, sparsifier_k(spec.param, d));
    case CompressorKind::rand_k:
      return compress_rand_k(x, sparsifier_k(spec.param, d), rng);
    case CompressorKind::rand2:
      return rng.next_unit() < spec.param ? x : Vector(x.size(), 0.0);
    case CompressorKind::qsgd:
      return compress_qsgd(x, spec.param, rng);
  }
  return x;
}

BitCostMode bit_cost_mode_from_string(const std::string& s) {
  if (s == "nominal") return BitCostMode::nominal;
  if (s == "exact") return BitCostMode::exact;
  throw ConfigError("unknown bit cost mode: \"" + s + "\" (expected nominal|exact)");
}

std::string to_string(BitCostMode mode) {
  return mode == BitCostMode::nominal ? "nominal" : "exact";
}

std::int64_t message_bits(const CompressorSpec& spec, int d, BitCostMode mode) {
  if (d < 1) throw ConfigError("message_bits: dimension must be >= 1");
  validate_compressor(spec);
  const auto ceil_log2 = [](int v) {
    int bits = 0;
    while ((1LL << bits) < v) ++bits;
    return bits;
  };
  switch (spec.kind) {
    case CompressorKind::identity:
      return static_cast<std::int64_t>(d) * 32;
    case CompressorKind::top_k:
    case CompressorKind::rand_k: {
      const std::int64_t k = sparsifier_k(spec.param, d);
      if (mode == BitCostMode::nominal) return k * 32;
      return k * (32 + ceil_log2(d));
    }
    case CompressorKind::rand2: {
      const double payload = spec.param * d * 32.0;
      if (mode == BitCostMode::nominal) return std::llround(payload);
      return std::llround(1.0 + payload);
    }
    case CompressorKind::qsgd: {
      if (mode == BitCostMode::nominal)
        return std::llround(static_cast<double>(d) * spec.param);
      return 32 + std::llround(static_cast<double>(d) * (spec.param + 1.0));
    }
  }
  return 0;
}

}  // namespace delicoco
