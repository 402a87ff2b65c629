#include "delicoco/optim.hpp"

#include <cmath>
#include <cstdio>

#include "delicoco/errors.hpp"

namespace delicoco {

namespace {

constexpr double kDivergenceCeiling = 1e12;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ConfigError("consensus step size gamma must be in (0, 1], got " + format_double(gamma));
}

}  // namespace

SeededRng compression_rng(std::uint64_t run_seed, int t, int q, int node) {
  return SeededRng::substream(run_seed, {streams::kCompression, static_cast<std::uint64_t>(t),
                                         static_cast<std::uint64_t>(q),
                                         static_cast<std::uint64_t>(node)});
}

NodeStates gossip_round(const NodeStates& states, const MixingMatrix& mixing, double gamma,
                        const CompressorSpec& compressor, std::uint64_t run_seed, int t, int q) {
  validate_gamma(gamma);
  const int d = states.x.rows;
  const int n = states.x.cols;
  if (states.z.rows != d || states.z.cols != n || states.s.rows != d || states.s.cols != n)
    throw ContractViolation("gossip_round: state matrices have inconsistent shapes");
  if (mixing.w.rows != n || mixing.w.cols != n)
    throw ContractViolation("gossip_round: mixing matrix does not match node count");

  Matrix messages(d, n);
  Vector diff(d);
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < d; ++r) diff[r] = states.x(r, i) - states.z(r, i);
    SeededRng rng = compression_rng(run_seed, t, q, i);
    const Vector m = compress(compressor, diff, rng);
    for (int r = 0; r < d; ++r) messages(r, i) = m[r];
  }

  NodeStates next;
  next.s = matmul(messages, mixing.w);
  for (size_t k = 0; k < next.s.data.size(); ++k) next.s.data[k] += states.s.data[k];
  next.z = states.z;
  for (size_t k = 0; k < next.z.data.size(); ++k) next.z.data[k] += messages.data[k];
  next.x = states.x;
  for (size_t k = 0; k < next.x.data.size(); ++k)
    next.x.data[k] += gamma * (next.s.data[k] - next.z.data[k]);
  return next;
}

std::pair<double, double> consensus_error(const NodeStates& states) {
  const Vector mean = col_mean(states.x);
  double x_gap = 0.0;
  for (int c = 0; c < states.x.cols; ++c)
    for (int r = 0; r < states.x.rows; ++r) {
      const double e = states.x(r, c) - mean[r];
      x_gap += e * e;
    }
  double z_gap = 0.0;
  for (size_t k = 0; k < states.x.data.size(); ++k) {
    const double e = states.x.data[k] - states.z.data[k];
    z_gap += e * e;
  }
  return {x_gap, z_gap};
}

namespace {

void base_metadata(RunTrace& trace, const AlgoConfig& config, const DistributedObjective& obj,
                   double f_star, const std::string& algorithm) {
  trace.metadata["algorithm"] = algorithm;
  trace.metadata["eta"] = format_double(config.eta);
  trace.metadata["gamma"] = format_double(config.gamma);
  trace.metadata["q_steps"] = std::to_string(config.q_steps);
  trace.metadata["iters"] = std::to_string(config.iters);
  trace.metadata["compressor"] = to_string(config.compressor);
  trace.metadata["bit_mode"] = to_string(config.bit_mode);
  trace.metadata["seed"] = std::to_string(config.seed);
  trace.metadata["rng"] = SeededRng::kAlgorithm;
  trace.metadata["f_star"] = format_double(f_star);
  trace.metadata["n"] = std::to_string(obj.n);
  trace.metadata["d"] = std::to_string(obj.dataset.dim());
  trace.metadata["task"] = to_string(obj.dataset.task);
  trace.metadata["l2"] = format_double(obj.l2);
}

// Shared DeLi-CoCo loop. `compressor`, `gamma` and `q_steps` arrive already
// resolved so dgd can pin them; `bits_per_message` likewise.
RunTrace run_engine(const AlgoConfig& config, const DistributedObjective& obj, double f_star,
                    const CompressorSpec& compressor, double gamma, int q_steps,
                    std::int64_t bits_per_message, const Matrix* x0,
                    const std::string& algorithm) {
  if (config.eta <= 0.0) throw ConfigError("gradient step size eta must be positive");
  if (q_steps < 1) throw ConfigError("q_steps must be >= 1");
  if (config.iters < 1) throw ConfigError("iters must be >= 1");
  validate_gamma(gamma);
  const int n = obj.n;
  const int d = obj.dataset.dim();
  if (config.mixing.w.rows != n)
    throw ConfigError("mixing matrix dimension " + std::to_string(config.mixing.w.rows) +
                      " does not match node count " + std::to_string(n));

  NodeStates states = NodeStates::zeros(d, n);
  if (x0 != nullptr) {
    if (x0->rows != d || x0->cols != n)
      throw ContractViolation("initial iterate shape does not match problem");
    states.x = *x0;
  }

  RunTrace trace;
  base_metadata(trace, config, obj, f_star, algorithm);
  trace.metadata["gamma"] = format_double(gamma);
  trace.metadata["q_steps"] = std::to_string(q_steps);
  trace.metadata["compressor"] = to_string(compressor);
  trace.rows.reserve(static_cast<size_t>(config.iters));

  std::int64_t bits = 0;
  Vector xi(d), gi(d);
  for (int t = 1; t <= config.iters; ++t) {
    for (int i = 0; i < n; ++i) {
      for (int r = 0; r < d; ++r) xi[r] = states.x(r, i);
      gi = local_grad(obj, i, xi);
      for (int r = 0; r < d; ++r) states.x(r, i) = xi[r] - config.eta * gi[r];
    }
    for (int q = 0; q < q_steps; ++q) {
      states = gossip_round(states, config.mixing, gamma, compressor, config.seed, t, q);
      bits += static_cast<std::int64_t>(n) * bits_per_message;
    }

    const Vector mean = col_mean(states.x);
    const double sub = global_loss(obj, mean) - f_star;
    if (!std::isfinite(sub) || sub > kDivergenceCeiling)
      throw DivergenceError("run diverged at iteration " + std::to_string(t) +
                            " (suboptimality " + format_double(sub) + ")", t);
    const auto [x_gap, z_gap] = consensus_error(states);
    trace.rows.push_back({t, sub, x_gap, z_gap, bits});
  }
  return trace;
}

}  // namespace

RunTrace deli_coco(const AlgoConfig& config, const DistributedObjective& obj, double f_star,
                   const Matrix* x0) {
  const std::int64_t per_message =
      message_bits(config.compressor, obj.dataset.dim(), config.bit_mode);
  return run_engine(config, obj, f_star, config.compressor, config.gamma, config.q_steps,
                    per_message, x0, "deli_coco");
}

RunTrace dgd(const AlgoConfig& config, const DistributedObjective& obj, double f_star,
             const Matrix* x0) {
  const CompressorSpec identity{CompressorKind::identity, 1.0};
  const std::int64_t per_message = static_cast<std::int64_t>(obj.dataset.dim()) * 32;
  return run_engine(config, obj, f_star, identity, 1.0, 1, per_message, x0, "dgd");
}

RunTrace centralized_gd(const AlgoConfig& config, const DistributedObjective& obj, double f_star,
                        const Vector* x0) {
  if (config.eta <= 0.0) throw ConfigError("gradient step size eta must be positive");
  if (config.iters < 1) throw ConfigError("iters must be >= 1");
  RunTrace trace;
  base_metadata(trace, config, obj, f_star, "centralized_gd");
  Vector x(obj.dataset.dim(), 0.0);
  if (x0 != nullptr) {
    if (x0->size() != x.size())
      throw ContractViolation("centralized_gd: start point dimension mismatch");
    x = *x0;
  }
  for (int t = 1; t <= config.iters; ++t) {
    const Vector g = global_grad(obj, x);
    for (size_t j = 0; j < x.size(); ++j) x[j] -= config.eta * g[j];
    const double sub = global_loss(obj, x) - f_star;
    if (!std::isfinite(sub) || sub > kDivergenceCeiling)
      throw DivergenceError("run diverged at iteration " + std::to_string(t) +
                            " (suboptimality " + format_double(sub) + ")", t);
    trace.rows.push_back({t, sub, 0.0, 0.0, 0});
  }
  return trace;
}

}  // namespace delicoco
