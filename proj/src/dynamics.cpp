// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dpd/certify.hpp"
#include "dpd/errors.hpp"
#include "dpd/geometry.hpp"

namespace dpd {

void SolverConfig::check() const {
  if (!(step_h > 0.0) || step_h >= 1.0) throw std::invalid_argument("config: step_h must be in (0, 1)");
  if (!(horizon_T > 0.0)) throw std::invalid_argument("config: horizon_T must be positive");
  if (horizon_T / step_h > 1e8 + 0.5) throw std::invalid_argument("config: horizon_T / step_h exceeds 1e8");
  if (record_every < 1) throw std::invalid_argument("config: record_every must be >= 1");
  if (K && !(*K >= 0.0)) throw std::invalid_argument("config: K must be nonnegative");
}

namespace {

// Halton low-discrepancy point in [0,1)^d, bases 2,3,5,...
double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Max over the box of |p'x + q|, attained at a vertex; separable per coordinate.
double affine_abs_max_on_box(const Vector& p, double q, const Vector& lo, const Vector& hi) {
  double vmax = q, vmin = q;
  for (int k = 0; k < p.size(); ++k) {
    vmax += std::max(p[k] * lo[k], p[k] * hi[k]);
    vmin += std::min(p[k] * lo[k], p[k] * hi[k]);
  }
  return std::max(std::abs(vmax), std::abs(vmin));
}

// Flattens a box or a product of boxes into plain bounds; nullopt otherwise.
std::optional<std::pair<Vector, Vector>> as_plain_box(const ConvexSet& set) {
  if (set.is_box()) return std::make_pair(set.as_box().lower, set.as_box().upper);
  if (!set.is_product()) return std::nullopt;
  Vector lo(set.dimension()), hi(set.dimension());
  int at = 0;
  for (const auto& f : set.as_product().factors) {
    const auto sub = as_plain_box(f);
    if (!sub) return std::nullopt;
    lo.segment(at, f.dimension()) = sub->first;
    hi.segment(at, f.dimension()) = sub->second;
    at += f.dimension();
  }
  return std::make_pair(std::move(lo), std::move(hi));
}

double agent_constraint_bound(const AgentSpec& agent) {
  const int dim = agent.dim;
  const auto box = as_plain_box(agent.set);

  // Exact path: every row affine and either constant or on a box.
  bool exact_ok = true;
  double sq = 0.0;
  for (const auto& row : agent.constraint.rows()) {
    const auto parts = row.affine_parts(dim);
    if (!parts) {
      exact_ok = false;
      break;
    }
    const auto& [p, q] = *parts;
    if (p.cwiseAbs().maxCoeff() == 0.0) {
      sq += q * q;
    } else if (box) {
      const double m = affine_abs_max_on_box(p, q, box->first, box->second);
      sq += m * m;
    } else {
      exact_ok = false;
      break;
    }
  }
  if (exact_ok) return std::sqrt(sq);

  // Sampled path: boundary-biased Halton points over an inflated bounding
  // box, projected onto the set; max norm inflated by 1.2.
  const auto [lo, hi] = agent.set.bounding_box();
  const Vector center = 0.5 * (lo + hi);
  const Vector half = (0.5 * (hi - lo)).cwiseMax(1e-9);
  double best = 0.0;
  Vector z(dim), g(agent.constraint.n_constraints());
  for (int s = 0; s < 1000; ++s) {
    for (int k = 0; k < dim; ++k) {
      const double u = halton(static_cast<std::uint64_t>(s + 1), kPrimes[k % 16]);
      z[k] = center[k] + 3.0 * half[k] * (2.0 * u - 1.0);  // 3x inflation biases toward the boundary
    }
    const Vector point = project(agent.set, z).point;
    agent.constraint.value_into(point, g);
    best = std::max(best, g.norm());
  }
  return 1.2 * best;
}

}  // namespace

double penalty_gain(const CoupledProblem& problem) {
  double sq = 0.0;
  for (const auto& agent : problem.agents()) {
    const double mi = agent_constraint_bound(agent);
    sq += mi * mi;
  }
  return 1.5 * std::sqrt(static_cast<double>(problem.n_agents())) * std::sqrt(sq);
}

namespace {

struct StepWorkspace {
  std::vector<Vector> g;  // g_i(x_i) at the old state
  Vector field, moved, dual;
  double max_field_sq = 0.0;

  explicit StepWorkspace(const CoupledProblem& p) : g(p.n_agents()) {
    for (int i = 0; i < p.n_agents(); ++i) g[i] = Vector::Zero(p.m_constraints());
  }
};

// One Jacobi round; reads `cur`, writes `next`. Allocation-free after warmup.
void step_into(const CoupledProblem& problem, const NetworkState& cur, double h, double K,
               StepWorkspace& ws, NetworkState& next) {
  const int n = problem.n_agents();
  double field_sq = 0.0;
  for (int i = 0; i < n; ++i) problem.agent(i).constraint.value_into(cur.x[i], ws.g[i]);
  for (int i = 0; i < n; ++i) {
    const auto& agent = problem.agent(i);
    detail::primal_field_into(agent, cur.x[i], cur.lambda.of(i), ws.field);
    field_sq += ws.field.squaredNorm();
    ws.moved = cur.x[i] + h * ws.field;
    detail::project_into(agent.set, ws.moved, next.x[i]);
    detail::dual_field_into(problem.graph(), ws.g[i], cur.lambda, K, i, ws.dual);
    field_sq += ws.dual.squaredNorm();
    next.lambda.of(i) = (cur.lambda.of(i) + h * ws.dual).cwiseMax(0.0);
  }
  ws.max_field_sq = std::max(ws.max_field_sq, field_sq);
  next.t = cur.t + h;
}

}  // namespace

NetworkState distributed_step(const CoupledProblem& problem, const NetworkState& state, double h,
                              double K) {
  if (static_cast<int>(state.x.size()) != problem.n_agents() ||
      state.lambda.n_agents() != problem.n_agents())
    throw std::invalid_argument("distributed_step: state shape mismatch");
  for (int i = 0; i < problem.n_agents(); ++i) {
    if (!problem.agent(i).set.contains(state.x[i], 1e-6))
      throw InfeasibleState("distributed_step: x_" + std::to_string(i + 1) + " violates its set");
  }
  NetworkState next{state.x, MultiplierStack(problem.n_agents(), problem.m_constraints()), state.t};
  StepWorkspace ws(problem);
  step_into(problem, state, h, K, ws, next);
  return next;
}

CentralState centralized_step(const CoupledProblem& problem, const CentralState& state, double h) {
  if (state.x.size() != problem.total_dim() || state.lambda.size() != problem.m_constraints())
    throw std::invalid_argument("centralized_step: state shape mismatch");
  CentralState next;
  next.x.resize(problem.total_dim());
  Vector gsum = Vector::Zero(problem.m_constraints());
  Vector gi(problem.m_constraints()), field, block;
  for (int i = 0; i < problem.n_agents(); ++i) {
    const auto& agent = problem.agent(i);
    const auto xi = state.x.segment(problem.offset(i), agent.dim);
    agent.constraint.value_into(xi, gi);
    gsum += gi;
    detail::primal_field_into(agent, xi, state.lambda, field);
    detail::project_into(agent.set, xi + h * field, block);
    next.x.segment(problem.offset(i), agent.dim) = block;
  }
  next.lambda = (state.lambda + h * gsum).cwiseMax(0.0);
  next.t = state.t + h;
  return next;
}

std::vector<Vector> initial_primal(const CoupledProblem& problem) {
  if (problem.initial_point()) return problem.split_stacked(*problem.initial_point());
  std::vector<Vector> x;
  x.reserve(problem.n_agents());
  for (const auto& agent : problem.agents())
    x.push_back(project(agent.set, Vector::Zero(agent.dim)).point);
  return x;
}

double lyapunov_value(const NetworkState& state, const CoupledProblem& problem,
                      const SaddleReference& reference) {
  double v = 0.0;
  for (int i = 0; i < problem.n_agents(); ++i) {
    v += 0.5 * (state.x[i] - reference.x.segment(problem.offset(i), problem.agent(i).dim)).squaredNorm();
    v += 0.5 * (state.lambda.of(i) - reference.lambda).squaredNorm();
  }
  return v;
}

RunRecord run(const CoupledProblem& problem, const SolverConfig& config,
              const std::optional<SaddleReference>& reference) {
  config.check();
  const int n = problem.n_agents();
  const int m = problem.m_constraints();
  const double h = config.step_h;
  const auto steps = static_cast<std::int64_t>(std::ceil(config.horizon_T / h - 1e-12));
  const double K = config.K ? *config.K : penalty_gain(problem);
  const double diverged_guard = 1e6 * (1.0 + K);

  RunRecord rec;
  rec.K = K;

  NetworkState cur{initial_primal(problem), MultiplierStack(n, m), 0.0};
  NetworkState next{cur.x, MultiplierStack(n, m), 0.0};
  StepWorkspace ws(problem);

  // Full-resolution trapezoidal integrals of x and lambda.
  std::vector<Vector> xint(cur.x);
  for (auto& v : xint) v.setZero();
  MultiplierStack lamint(n, m);

  auto record_sample = [&](const NetworkState& s) {
    rec.samples.push_back(s);
    AverageSample avg;
    avg.t = s.t;
    if (s.t > 0.0) {
      avg.x_hat.reserve(n);
      for (int i = 0; i < n; ++i) avg.x_hat.push_back(xint[i] / s.t);
      MultiplierStack lh(n, m);
      for (int i = 0; i < n; ++i) lh.of(i) = lamint.of(i) / s.t;
      avg.lambda_hat = std::move(lh);
    } else {
      avg.x_hat = s.x;
      avg.lambda_hat = s.lambda;
    }
    rec.lagrangian_at_averages.push_back(modified_lagrangian(problem, avg.x_hat, avg.lambda_hat, K));
    rec.averages.push_back(std::move(avg));
  };

  record_sample(cur);

  for (std::int64_t k = 0; k < steps; ++k) {
    const double hk =
        config.diminishing_steps ? h / std::pow(1.0 + static_cast<double>(k), 0.51) : h;
    step_into(problem, cur, hk, K, ws, next);
    if (!config.diminishing_steps) next.t = static_cast<double>(k + 1) * h;  // avoid accumulation drift
    for (int i = 0; i < n; ++i) {
      xint[i] += (0.5 * hk) * (cur.x[i] + next.x[i]);
      lamint.of(i) += (0.5 * hk) * (cur.lambda.of(i) + next.lambda.of(i));
    }
    std::swap(cur, next);
    if (cur.lambda.norm() > diverged_guard)
      throw Diverged("multiplier norm exceeded " + std::to_string(diverged_guard) +
                     "; K mis-set or problem infeasible");
    if ((k + 1) % config.record_every == 0 || k + 1 == steps) record_sample(cur);
  }

  rec.field_norm_bound = std::sqrt(ws.max_field_sq);
  rec.final_state = cur;
  rec.final_average_x = rec.averages.back().x_hat;
  rec.final_average_lambda = rec.averages.back().lambda_hat;

  if (reference) {
    rec.reference = *reference;
  } else {
    rec.reference = SaddleReference{stack(cur.x), cur.lambda.mean()};
  }
  {
    const auto xstar = problem.split_stacked(rec.reference.x);
    rec.saddle_value = lagrangian(problem, xstar, rec.reference.lambda);

    // Diagnostics against the (provided or computed) saddle anchor.
    std::vector<Vector> gstar(n);
    for (int i = 0; i < n; ++i) gstar[i] = problem.agent(i).constraint.value(xstar[i]);
    const double fstar = problem.total_cost(xstar);
    rec.diagnostics.reserve(rec.samples.size());
    for (const auto& s : rec.samples) {
      DiagnosticsRow row;
      row.t = s.t;
      row.V = lyapunov_value(s, problem, rec.reference);
      double l_at_ref = fstar;  // Ltilde(x*, Lambda(t))
      for (int i = 0; i < n; ++i) l_at_ref += s.lambda.of(i).dot(gstar[i]);
      l_at_ref -= K * consensus_penalty(problem.graph(), s.lambda);
      row.W = lagrangian(problem, s.x, rec.reference.lambda) - l_at_ref;
      row.phi = consensus_penalty(problem.graph(), s.lambda);
      row.violation = std::max(0.0, problem.coupled_value(s.x).maxCoeff());
      row.kkt_max = kkt_residual(problem, s.x, s.lambda.mean()).max_residual();
      rec.diagnostics.push_back(row);
    }
  }
  return rec;
}

}  // namespace dpd
