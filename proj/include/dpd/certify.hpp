// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <utility>
#include <vector>

#include "dpd/calculus.hpp"
#include "dpd/dynamics.hpp"
#include "dpd/problem.hpp"

namespace dpd {

// KKT residuals at a primal point with a single (consensus) multiplier.
// All residuals are nonnegative and vanish exactly at a primal-dual pair.
struct KktReport {
  // Norm of the projected-step surrogate ||(P_Omega(x - h0 s) - x)/h0||,
  // h0 = 1e-6, where s is the minimal-norm element of the exact
  // subdifferential set d f(x) + d g(x) lambda. The set-based selection
  // (rather than a fixed per-atom one) keeps the residual zero at optima
  // that sit on kinks.
  double stationarity = 0.0;
  double complementarity = 0.0;   // sum_k |lambda_k * g_k(x)|
  double primal_violation = 0.0;  // ||max(sum_i g_i, 0)||
  double dual_feasibility = 0.0;  // ||min(lambda, 0)||

  double max_residual() const;
};

KktReport kkt_residual(const CoupledProblem& problem, const std::vector<Vector>& x,
                       const Vector& lambda);

// Merit W(x, Lambda) = Ltilde(x, Lambda*) - Ltilde(x*, Lambda) against a
// verified saddle pair. Nonnegative (up to reference accuracy) everywhere,
// zero only at saddle points sharing the same x*.
double merit(const CoupledProblem& problem, const std::vector<Vector>& x,
             const MultiplierStack& lambda, const SaddleReference& saddle, double K);

// Bound on the dual optimal set radius from a Slater point:
// radius = (f(xbar) - q_tilde) / gamma, gamma = min_k(-sum_i g_ik(xbar_i)).
// q_tilde is estimated by per-agent projected subgradient descent with
// diminishing steps; the estimate upper-bounds the true minimum, so the
// reported radius may be an underestimate. Diagnostic only.
struct DualBound {
  double radius = 0.0;
  double gamma = 0.0;
  double q_tilde = 0.0;
};

DualBound dual_ball(const CoupledProblem& problem, const Vector& xbar, const Vector& lambda_tilde,
                    int inner_budget);

// The rate series t * |Ltilde(x_hat(t), lambda_hat(t)) - saddle_value| over
// the recorded averages, and its supremum (the empirical theta_0).
struct RateCertificate {
  std::vector<std::pair<double, double>> series;  // (t, product)
  double theta0 = 0.0;
};

RateCertificate rate_certificate(const RunRecord& record, double saddle_value);

}  // namespace dpd
