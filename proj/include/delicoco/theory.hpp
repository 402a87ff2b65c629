#pragma once

#include "delicoco/numkit.hpp"
#include "delicoco/objectives.hpp"

namespace delicoco {

// Smoothness / curvature constants of a distributed objective.
//   l_avg = mean_i L_i     l_hat = max_i L_i
//   mu    = mean_i mu_i    mu_hat = min_i mu_i
struct ProblemConstants {
  double l_avg = 0.0;
  double l_hat = 0.0;
  double mu = 0.0;
  double mu_hat = 0.0;
  int n = 1;
  double r0 = 0.0;        // initial suboptimality F(X0) - f*
  double d0 = 0.0;        // initial squared distance ||X0 - X*||^2
  double delta_sq = 0.0;  // sum_i ||grad f_i(x*)||^2
};

struct SmoothnessEstimate {
  double l_avg = 0.0;
  double l_hat = 0.0;
  double mu = 0.0;
  double mu_hat = 0.0;
  bool exact = false;  // true only for the linear task, where the Hessian is data
};

// Per-node curvature from the data Gram matrices (power iteration):
//   linear    L_i = lam_max(G_i) + l2,        mu_i = max(lam_min(G_i), 0) + l2
//   logistic  L_i = 0.25 * lam_max(G_i) + l2, mu_i = l2
//   relu      L_i = lam_max(G_i) + l2,        mu_i = l2
// with G_i = (1/n_i) A_i^T A_i. Logistic/relu values are estimates.
SmoothnessEstimate estimate_constants(const DistributedObjective& obj);

// Consensus learning rate
//   gamma = delta sqrt(omega) /
//           (16 delta + delta^2 - 8 delta sqrt(omega) + (4 + 2 delta) lambda_max^2(I - W))
// Requires a positive spectral gap.
double consensus_lr(double delta, double omega, double lambda_max_i_minus_w);

// The coarser per-round gossip rate bound 1 - delta^2 sqrt(omega) / 82,
// reported alongside the rate 1 - delta*gamma/2 implied by consensus_lr.
double gossip_rate_shorthand(double delta, double omega);

// Q0 = ceil(log(rho_bar / 46) / log(1 - delta*gamma/2)), at least 1.
// The strongly convex variant substitutes ell = 1 - mu_hat/l_hat for rho_bar.
int q_min_plc(double rho_bar, double delta, double gamma);

// Order-wise predictors: the two-term decompositions evaluated with unit
// constants. Useful for qualitative comparisons (monotonicity in Q and T),
// never for absolute accuracy. in_regime is false when q <= Q0.
struct BoundResult {
  double value = 0.0;
  bool in_regime = true;
};

//   rho_bar = 1 - mu/(n l_hat)
//   value = Delta^2/(1-rho_bar) (1-dg/2)^{Q/2}
//         + [1 + (L/(mu rho_bar)) (1 + (1-dg/2)^{Q/2})] R0 rho_bar^T
BoundResult plc_bound(const ProblemConstants& consts, double delta, double gamma, int q, int t);

//   ell = 1 - mu_hat/l_hat
//   value = Delta^2/mu_hat^2 (1-dg/2)^Q
//         + [1 + T/(ell^2 (l_hat-mu_hat)) (1-dg/2)^Q] D0 ell^T
BoundResult sc_bound(const ProblemConstants& consts, double delta, double gamma, int q, int t);

// Fixed-budget trade-off g(c) = (1 - delta^2 sqrt(omega_base)/(82 sqrt(c)))^{c q_base / 2},
// the rate of the (Q = c q_base, omega = omega_base / c) allocation.
double budget_tradeoff(double delta, double omega_base, int q_base, int c);

// Heterogeneity diagnostic sum_i ||grad f_i(x_star)||^2, probed at the
// single optimum the caller obtained from centralized_optimum.
double delta_sq_diag(const DistributedObjective& obj, const Vector& x_star);

}  // namespace delicoco
