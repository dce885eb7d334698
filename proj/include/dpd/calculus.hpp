// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <vector>

#include "dpd/linalg.hpp"
#include "dpd/problem.hpp"

namespace dpd {

/// Per-agent local multipliers lambda_i in R^M_+, length N.
class MultiplierStack {
 public:
  MultiplierStack() = default;  // empty placeholder; real stacks come from the sized constructors
  MultiplierStack(int n_agents, int m);
  explicit MultiplierStack(std::vector<Vector> per_agent);

  int n_agents() const { return static_cast<int>(per_agent_.size()); }
  int m() const { return m_; }
  const Vector& of(int i) const { return per_agent_[i]; }
  Vector& of(int i) { return per_agent_[i]; }
  const std::vector<Vector>& all() const { return per_agent_; }

  Vector mean() const;
  Vector stacked() const;
  double norm() const;

  /// max over agent pairs of |lambda_i - lambda_j|_1.
  double max_pairwise_l1() const;
  bool is_consensus(double tol) const { return max_pairwise_l1() <= tol; }

  /// Distance to the consensus cone: the mean-replicated stack is the
  /// nearest consensus point for nonnegative multipliers.
  double distance_to_consensus() const;

 private:
  std::vector<Vector> per_agent_;
  int m_ = 0;
};

// Componentwise selection from the set-valued sign (the subdifferential of
// |.|): +1 for positive, -1 for negative, 0 at ties (minimal-norm element
// of [-1, 1]).
Vector sign_select(const Vector& y);
inline double sign_select(double y) { return y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0); }

// Consensus penalty phi: half the sum over ordered neighbor pairs of
// |lambda_i - lambda_j|_1, i.e. the sum over undirected edges. Zero exactly
// on the consensus cone.
double consensus_penalty(const CommGraph& graph, const MultiplierStack& lambda);

/// Classical Lagrangian f(x) + lambda' * sum_i g_i(x_i) with a single multiplier.
double lagrangian(const CoupledProblem& problem, const std::vector<Vector>& x, const Vector& lambda);

/// Modified Lagrangian sum_i [f_i + lambda_i'g_i] - K * phi(lambda).
double modified_lagrangian(const CoupledProblem& problem, const std::vector<Vector>& x,
                           const MultiplierStack& lambda, double K);

// Primal velocity selection for agent i: the negative subgradient
// -(df_i(x_i) + dg_i(x_i)' lambda_i). Depends only on agent-local data.
Vector primal_field(const CoupledProblem& problem, const std::vector<Vector>& x,
                    const MultiplierStack& lambda, int agent);

// Dual velocity selection for agent i:
// g_i(x_i) - K * sum_{j in N_i} sign(lambda_i - lambda_j).
// Uses only neighbor multipliers.
Vector dual_field(const CoupledProblem& problem, const std::vector<Vector>& x,
                  const MultiplierStack& lambda, double K, int agent);

namespace detail {
/// Allocation-free variants for the integrator hot loop.
void primal_field_into(const AgentSpec& agent, const Vector& x_i, const Vector& lambda_i, Vector& out);
void dual_field_into(const CommGraph& graph, const Vector& g_i, const MultiplierStack& lambda,
                     double K, int i, Vector& out);
}  // namespace detail

}  // namespace dpd
