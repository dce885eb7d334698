// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpd/convex_set.hpp"
#include "dpd/function_family.hpp"
#include "dpd/graph.hpp"
#include "dpd/linalg.hpp"

namespace dpd {

/// Local cost oracle f_i: value and a subgradient selection.
class CostOracle {
 public:
  explicit CostOracle(FunctionFamily f) : f_(std::move(f)) {}
  double value(const Vector& x) const { return f_.eval(x); }
  Vector subgradient(const Vector& x) const { return f_.subgrad(x); }
  const FunctionFamily& family() const { return f_; }

 private:
  FunctionFamily f_;
};

/// Local constraint oracle g_i: M scalar rows, value and a Jacobian selection
/// whose rows are subgradient selections of the g_{ik}.
class ConstraintOracle {
 public:
  explicit ConstraintOracle(std::vector<FunctionFamily> rows);
  int n_constraints() const { return static_cast<int>(rows_.size()); }
  Vector value(const Vector& x) const;
  void value_into(const Vector& x, Vector& out) const;
  Matrix jacobian_selection(const Vector& x) const;
  const std::vector<FunctionFamily>& rows() const { return rows_; }

 private:
  std::vector<FunctionFamily> rows_;
};

struct AgentSpec {
  int id = 0;  // 0-based
  ConvexSet set;
  CostOracle cost;
  ConstraintOracle constraint;
  int dim = 0;
};

// N agents coupled through sum_i g_i(x_i) <= 0 over an undirected graph.
// Immutable after construction; structural mismatches (dimensions, agent
// counts) are construction errors. The optional Slater point feeds the
// dual-ball diagnostic only; the optional initial point seeds run().
class CoupledProblem {
 public:
  CoupledProblem(std::vector<AgentSpec> agents, CommGraph graph, int m_constraints,
                 std::optional<Vector> slater_point = std::nullopt,
                 std::optional<Vector> initial_point = std::nullopt);

  int n_agents() const { return static_cast<int>(agents_.size()); }
  int m_constraints() const { return m_; }
  const AgentSpec& agent(int i) const { return agents_.at(i); }
  const std::vector<AgentSpec>& agents() const { return agents_; }
  const CommGraph& graph() const { return graph_; }
  const std::optional<Vector>& slater_point() const { return slater_; }
  const std::optional<Vector>& initial_point() const { return x0_; }

  int total_dim() const { return total_dim_; }
  /// Start offset of agent i's block in a stacked vector.
  int offset(int i) const { return offsets_.at(i); }
  const std::vector<int>& dims() const { return dims_; }

  std::vector<Vector> split_stacked(const Vector& x) const;

  /// sum_i g_i(x_i), the coupled constraint value.
  Vector coupled_value(const std::vector<Vector>& x) const;

  double total_cost(const std::vector<Vector>& x) const;

 private:
  std::vector<AgentSpec> agents_;
  CommGraph graph_;
  int m_;
  std::optional<Vector> slater_;
  std::optional<Vector> x0_;
  std::vector<int> offsets_, dims_;
  int total_dim_;
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
};

// Checks the testable parts of the standing assumptions: graph connectivity,
// set boundedness, dimension consistency, sampled convexity inequalities for
// every cost and constraint row (random pairs; a report, never a guarantee),
// and strict Slater feasibility when a point is supplied. Failures are
// report entries, not exceptions. Pure and deterministic.
ValidationReport validate(const CoupledProblem& problem, int sample_pairs = 200,
                          std::uint64_t seed = 0x76a11da7eULL);

}  // namespace dpd
