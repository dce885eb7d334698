// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace dpd {

MultiplierStack::MultiplierStack(int n_agents, int m) : m_(m) {
  if (n_agents <= 0 || m <= 0) throw std::invalid_argument("multiplier stack: bad shape");
  per_agent_.assign(n_agents, Vector::Zero(m));
}

MultiplierStack::MultiplierStack(std::vector<Vector> per_agent) : per_agent_(std::move(per_agent)) {
  if (per_agent_.empty()) throw std::invalid_argument("multiplier stack: empty");
  m_ = static_cast<int>(per_agent_.front().size());
  for (const auto& l : per_agent_) {
    if (static_cast<int>(l.size()) != m_) throw std::invalid_argument("multiplier stack: ragged rows");
    if ((l.array() < 0.0).any()) throw std::invalid_argument("multiplier stack: negative component");
  }
}

Vector MultiplierStack::mean() const {
  Vector m = Vector::Zero(m_);
  for (const auto& l : per_agent_) m += l;
  return m / static_cast<double>(n_agents());
}

Vector MultiplierStack::stacked() const {
  Vector out(n_agents() * m_);
  for (int i = 0; i < n_agents(); ++i) out.segment(i * m_, m_) = per_agent_[i];
  return out;
}

double MultiplierStack::norm() const {
  double s = 0.0;
  for (const auto& l : per_agent_) s += l.squaredNorm();
  return std::sqrt(s);
}

double MultiplierStack::max_pairwise_l1() const {
  double worst = 0.0;
  for (int i = 0; i < n_agents(); ++i)
    for (int j = i + 1; j < n_agents(); ++j)
      worst = std::max(worst, (per_agent_[i] - per_agent_[j]).lpNorm<1>());
  return worst;
}

double MultiplierStack::distance_to_consensus() const {
  const Vector mu = mean();
  double s = 0.0;
  for (const auto& l : per_agent_) s += (l - mu).squaredNorm();
  return std::sqrt(s);
}

Vector sign_select(const Vector& y) {
  Vector s(y.size());
  for (int k = 0; k < y.size(); ++k) s[k] = sign_select(y[k]);
  return s;
}

double consensus_penalty(const CommGraph& graph, const MultiplierStack& lambda) {
  if (lambda.n_agents() != graph.n_nodes())
    throw std::invalid_argument("consensus_penalty: stack length differs from node count");
  double phi = 0.0;
  for (auto [i, j] : graph.edges()) phi += (lambda.of(i) - lambda.of(j)).lpNorm<1>();
  return phi;
}

double lagrangian(const CoupledProblem& problem, const std::vector<Vector>& x, const Vector& lambda) {
  return problem.total_cost(x) + lambda.dot(problem.coupled_value(x));
}

double modified_lagrangian(const CoupledProblem& problem, const std::vector<Vector>& x,
                           const MultiplierStack& lambda, double K) {
  double s = 0.0;
  for (int i = 0; i < problem.n_agents(); ++i) {
    const auto& a = problem.agent(i);
    s += a.cost.value(x[i]) + lambda.of(i).dot(a.constraint.value(x[i]));
  }
  return s - K * consensus_penalty(problem.graph(), lambda);
}

namespace detail {

void primal_field_into(const AgentSpec& agent, const Vector& x_i, const Vector& lambda_i, Vector& out) {
  out.setZero(x_i.size());
  agent.cost.family().add_subgrad(x_i, -1.0, out);
  const auto& rows = agent.constraint.rows();
  for (int k = 0; k < static_cast<int>(rows.size()); ++k) {
    if (lambda_i[k] != 0.0) rows[k].add_subgrad(x_i, -lambda_i[k], out);
  }
}

void dual_field_into(const CommGraph& graph, const Vector& g_i, const MultiplierStack& lambda,
                     double K, int i, Vector& out) {
  out = g_i;
  if (K == 0.0) return;
  const Vector& li = lambda.of(i);
  for (int j : graph.neighbors(i)) {
    const Vector& lj = lambda.of(j);
    for (int k = 0; k < out.size(); ++k) out[k] -= K * sign_select(li[k] - lj[k]);
  }
}

}  // namespace detail

Vector primal_field(const CoupledProblem& problem, const std::vector<Vector>& x,
                    const MultiplierStack& lambda, int agent) {
  Vector out;
  detail::primal_field_into(problem.agent(agent), x[agent], lambda.of(agent), out);
  return out;
}

Vector dual_field(const CoupledProblem& problem, const std::vector<Vector>& x,
                  const MultiplierStack& lambda, double K, int agent) {
  Vector g = problem.agent(agent).constraint.value(x[agent]);
  Vector out;
  detail::dual_field_into(problem.graph(), g, lambda, K, agent, out);
  return out;
}

Vector stack(const std::vector<Vector>& parts) {
  int total = 0;
  for (const auto& p : parts) total += static_cast<int>(p.size());
  Vector out(total);
  int at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += static_cast<int>(p.size());
  }
  return out;
}

std::vector<Vector> split(const Vector& x, const std::vector<int>& dims) {
  std::vector<Vector> out;
  out.reserve(dims.size());
  int at = 0;
  for (int d : dims) {
    out.push_back(x.segment(at, d));
    at += d;
  }
  if (at != x.size()) throw std::invalid_argument("split: sizes do not cover the vector");
  return out;
}

}  // namespace dpd
