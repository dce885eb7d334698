// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/certify.hpp"

#include <algorithm>
#include <cmath>

#include "dpd/errors.hpp"
#include "dpd/geometry.hpp"

namespace dpd {

double KktReport::max_residual() const {
  return std::max({stationarity, complementarity, primal_violation, dual_feasibility});
}

KktReport kkt_residual(const CoupledProblem& problem, const std::vector<Vector>& x,
                       const Vector& lambda) {
  constexpr double kProbeStep = 1e-6;
  KktReport rep;
  double stat_sq = 0.0;
  for (int i = 0; i < problem.n_agents(); ++i) {
    const auto& agent = problem.agent(i);
    SubdiffSet sub(agent.dim);
    agent.cost.family().add_subdiff(x[i], 1.0, sub);
    const auto& rows = agent.constraint.rows();
    for (int k = 0; k < static_cast<int>(rows.size()); ++k)
      if (lambda[k] != 0.0) rows[k].add_subdiff(x[i], lambda[k], sub);
    const Vector s = sub.min_norm_element();
    const Vector probe = project(agent.set, x[i] - kProbeStep * s).point;
    stat_sq += ((probe - x[i]) / kProbeStep).squaredNorm();
  }
  rep.stationarity = std::sqrt(stat_sq);

  const Vector g = problem.coupled_value(x);
  rep.complementarity = lambda.cwiseProduct(g).cwiseAbs().sum();
  rep.primal_violation = g.cwiseMax(0.0).norm();
  rep.dual_feasibility = lambda.cwiseMin(0.0).norm();
  return rep;
}

double merit(const CoupledProblem& problem, const std::vector<Vector>& x,
             const MultiplierStack& lambda, const SaddleReference& saddle, double K) {
  const auto xstar = problem.split_stacked(saddle.x);
  const double l_up = lagrangian(problem, x, saddle.lambda);  // Ltilde(x, Lambda*) at consensus
  double l_down = problem.total_cost(xstar);
  for (int i = 0; i < problem.n_agents(); ++i)
    l_down += lambda.of(i).dot(problem.agent(i).constraint.value(xstar[i]));
  l_down -= K * consensus_penalty(problem.graph(), lambda);
  return l_up - l_down;
}

DualBound dual_ball(const CoupledProblem& problem, const Vector& xbar, const Vector& lambda_tilde,
                    int inner_budget) {
  const auto xb = problem.split_stacked(xbar);
  const Vector g = problem.coupled_value(xb);
  DualBound out;
  out.gamma = -g.maxCoeff();
  if (!(out.gamma > 0.0))
    throw SlaterViolation("dual_ball: supplied point is not strictly feasible");

  // q_tilde = min_x L(x, lambda_tilde) decouples per agent; projected
  // subgradient descent with diminishing steps, keeping the best value.
  double q = 0.0;
  for (int i = 0; i < problem.n_agents(); ++i) {
    const auto& agent = problem.agent(i);
    const auto [lo, hi] = agent.set.bounding_box();
    const double step0 = std::max((hi - lo).norm(), 1e-3);
    Vector z = xb[i];
    auto objective = [&](const Vector& p) {
      return agent.cost.value(p) + lambda_tilde.dot(agent.constraint.value(p));
    };
    double best = objective(z);
    Vector grad(agent.dim);
    for (int k = 0; k < inner_budget; ++k) {
      grad.setZero();
      agent.cost.family().add_subgrad(z, 1.0, grad);
      const auto& rows = agent.constraint.rows();
      for (int r = 0; r < static_cast<int>(rows.size()); ++r)
        if (lambda_tilde[r] != 0.0) rows[r].add_subgrad(z, lambda_tilde[r], grad);
      const double gn = grad.norm();
      if (gn == 0.0) break;
      const double alpha = step0 / (gn * std::sqrt(static_cast<double>(k + 1)));
      z = project(agent.set, z - alpha * grad).point;
      best = std::min(best, objective(z));
    }
    q += best;
  }
  out.q_tilde = q;
  out.radius = (problem.total_cost(xb) - q) / out.gamma;
  return out;
}

RateCertificate rate_certificate(const RunRecord& record, double saddle_value) {
  RateCertificate cert;
  cert.series.reserve(record.averages.size());
  for (std::size_t k = 0; k < record.averages.size(); ++k) {
    const double t = record.averages[k].t;
    if (t <= 0.0) continue;
    const double product = t * std::abs(record.lagrangian_at_averages[k] - saddle_value);
    cert.series.emplace_back(t, product);
    cert.theta0 = std::max(cert.theta0, product);
  }
  return cert;
}

}  // namespace dpd
