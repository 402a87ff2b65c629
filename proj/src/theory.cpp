#include "delicoco/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "delicoco/errors.hpp"

namespace delicoco {

namespace {

void normalize(Vector& v) {
  const double norm = std::sqrt(norm_sq(v));
  if (norm > 0.0)
    for (double& x : v) x /= norm;
}

// G v with G = (1/n_i) A^T A restricted to sample rows [begin, end),
// applied through A without forming G.
Vector gram_apply(const Matrix& features, int begin, int end, const Vector& v) {
  const int d = features.cols;
  Vector gv(static_cast<size_t>(d), 0.0);
  for (int r = begin; r < end; ++r) {
    const double* a = features.row_ptr(r);
    double z = 0.0;
    for (int j = 0; j < d; ++j) z += a[j] * v[j];
    for (int j = 0; j < d; ++j) gv[j] += z * a[j];
  }
  const int ni = end - begin;
  for (double& x : gv) x /= ni;
  return gv;
}

// Largest eigenvalue of the node Gram matrix by power iteration.
double gram_lambda_max(const Matrix& features, int begin, int end) {
  const int d = features.cols;
  Vector v(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) v[j] = 1.0 + 1e-3 * j;  // deterministic start
  normalize(v);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector u = gram_apply(features, begin, end, v);
    const double next = dot(u, v);  // Rayleigh quotient, v is unit
    const double norm = std::sqrt(norm_sq(u));
    if (norm == 0.0) return 0.0;
    for (int j = 0; j < d; ++j) v[j] = u[j] / norm;
    if (it > 10 && std::fabs(next - lambda) <= 1e-13 * std::max(1.0, std::fabs(next))) return next;
    lambda = next;
  }
  return lambda;
}

// Smallest eigenvalue of the node Gram matrix via power iteration on
// (c I - G) with c just above lam_max(G).
double gram_lambda_min(const Matrix& features, int begin, int end, double lambda_max) {
  const int d = features.cols;
  const double c = lambda_max * (1.0 + 1e-9) + 1e-12;
  Vector v(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) v[j] = 1.0 - 1e-3 * j;
  normalize(v);
  double shifted = 0.0;
  for (int it = 0; it < 500; ++it) {
    const Vector gv = gram_apply(features, begin, end, v);
    Vector u(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) u[j] = c * v[j] - gv[j];
    const double next = dot(u, v);
    const double norm = std::sqrt(norm_sq(u));
    if (norm == 0.0) return c;
    for (int j = 0; j < d; ++j) v[j] = u[j] / norm;
    if (it > 10 && std::fabs(next - shifted) <= 1e-13 * std::max(1.0, std::fabs(next)))
      return c - next;
    shifted = next;
  }
  return c - shifted;
}

}  // namespace

SmoothnessEstimate estimate_constants(const DistributedObjective& obj) {
  SmoothnessEstimate est;
  est.exact = obj.dataset.task == TaskKind::linear;
  double l_sum = 0.0, mu_sum = 0.0;
  est.l_hat = 0.0;
  est.mu_hat = std::numeric_limits<double>::infinity();
  for (int i = 0; i < obj.n; ++i) {
    const auto [begin, end] = obj.partition.node_ranges[i];
    const double lmax = gram_lambda_max(obj.dataset.features, begin, end);
    double li = 0.0, mui = 0.0;
    switch (obj.dataset.task) {
      case TaskKind::linear:
        li = lmax + obj.l2;
        mui = std::max(gram_lambda_min(obj.dataset.features, begin, end, lmax), 0.0) + obj.l2;
        break;
      case TaskKind::logistic:
        li = 0.25 * lmax + obj.l2;
        mui = obj.l2;
        break;
      case TaskKind::relu:
        li = lmax + obj.l2;
        mui = obj.l2;
        break;
    }
    l_sum += li;
    mu_sum += mui;
    est.l_hat = std::max(est.l_hat, li);
    est.mu_hat = std::min(est.mu_hat, mui);
  }
  est.l_avg = l_sum / obj.n;
  est.mu = mu_sum / obj.n;
  return est;
}

double consensus_lr(double delta, double omega, double lambda_max_i_minus_w) {
  if (delta <= 0.0)
    throw ConfigError("consensus_lr: spectral gap is zero (disconnected graph violates the mixing assumption)");
  if (delta > 1.0 || omega <= 0.0 || omega > 1.0)
    throw ConfigError("consensus_lr: delta and omega must lie in (0, 1]");
  if (lambda_max_i_minus_w < 0.0 || lambda_max_i_minus_w > 2.0)
    throw ConfigError("consensus_lr: lambda_max(I - W) must lie in [0, 2]");
  const double sw = std::sqrt(omega);
  const double denom = 16.0 * delta + delta * delta - 8.0 * delta * sw +
                       (4.0 + 2.0 * delta) * lambda_max_i_minus_w * lambda_max_i_minus_w;
  return delta * sw / denom;
}

double gossip_rate_shorthand(double delta, double omega) {
  return 1.0 - delta * delta * std::sqrt(omega) / 82.0;
}

int q_min_plc(double rho_bar, double delta, double gamma) {
  if (!(rho_bar > 0.0 && rho_bar < 1.0))
    throw ConfigError("q_min_plc: rate must lie in (0, 1)");
  const double dg = delta * gamma / 2.0;
  if (!(dg > 0.0 && dg < 1.0)) throw ConfigError("q_min_plc: delta*gamma/2 must lie in (0, 1)");
  const double q = std::ceil(std::log(rho_bar / 46.0) / std::log(1.0 - dg));
  return std::max(1, static_cast<int>(q));
}

BoundResult plc_bound(const ProblemConstants& consts, double delta, double gamma, int q, int t) {
  if (consts.l_hat <= 0.0 || consts.mu <= 0.0)
    throw ConfigError("plc_bound: positive mu and l_hat required");
  const double rho_bar = 1.0 - consts.mu / (consts.n * consts.l_hat);
  if (!(rho_bar > 0.0 && rho_bar < 1.0))
    throw ConfigError("plc_bound: rho_bar outside (0, 1); check the constants");
  const double decay = std::pow(1.0 - delta * gamma / 2.0, q / 2.0);
  BoundResult res;
  res.in_regime = q > q_min_plc(rho_bar, delta, gamma);
  const double radius = consts.delta_sq / (1.0 - rho_bar) * decay;
  const double coeff = 1.0 + consts.l_avg / (consts.mu * rho_bar) * (1.0 + decay);
  res.value = radius + coeff * consts.r0 * std::pow(rho_bar, t);
  return res;
}

BoundResult sc_bound(const ProblemConstants& consts, double delta, double gamma, int q, int t) {
  if (consts.l_hat <= 0.0 || consts.mu_hat <= 0.0)
    throw ConfigError("sc_bound: positive mu_hat and l_hat required");
  const double ell = 1.0 - consts.mu_hat / consts.l_hat;
  if (!(ell > 0.0 && ell < 1.0))
    throw ConfigError("sc_bound: ell outside (0, 1); check the constants");
  const double decay = std::pow(1.0 - delta * gamma / 2.0, q);
  BoundResult res;
  res.in_regime = q > q_min_plc(ell, delta, gamma);
  const double radius = consts.delta_sq / (consts.mu_hat * consts.mu_hat) * decay;
  const double coeff = 1.0 + t / (ell * ell * (consts.l_hat - consts.mu_hat)) * decay;
  res.value = radius + coeff * consts.d0 * std::pow(ell, t);
  return res;
}

double budget_tradeoff(double delta, double omega_base, int q_base, int c) {
  if (c < 1) throw ConfigError("budget_tradeoff: c must be a positive integer");
  if (q_base < 1) throw ConfigError("budget_tradeoff: q_base must be >= 1");
  if (!(omega_base > 0.0 && omega_base <= 1.0))
    throw ConfigError("budget_tradeoff: omega_base must lie in (0, 1]");
  if (delta < 0.0 || delta > 1.0) throw ConfigError("budget_tradeoff: delta must lie in [0, 1]");
  const double base = 1.0 - delta * delta * std::sqrt(omega_base) / (82.0 * std::sqrt(static_cast<double>(c)));
  return std::pow(base, static_cast<double>(c) * q_base / 2.0);
}

double delta_sq_diag(const DistributedObjective& obj, const Vector& x_star) {
  double acc = 0.0;
  for (int i = 0; i < obj.n; ++i) acc += norm_sq(local_grad(obj, i, x_star));
  return acc;
}

}  // namespace delicoco
