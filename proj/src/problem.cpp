// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dpd/errors.hpp"
#include "dpd/geometry.hpp"
#include "dpd/rng.hpp"

namespace dpd {

ConstraintOracle::ConstraintOracle(std::vector<FunctionFamily> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("constraint oracle: no rows");
}

Vector ConstraintOracle::value(const Vector& x) const {
  Vector out(n_constraints());
  value_into(x, out);
  return out;
}

void ConstraintOracle::value_into(const Vector& x, Vector& out) const {
  out.resize(n_constraints());
  for (int k = 0; k < n_constraints(); ++k) out[k] = rows_[k].eval(x);
}

Matrix ConstraintOracle::jacobian_selection(const Vector& x) const {
  Matrix J = Matrix::Zero(n_constraints(), x.size());
  Vector row = Vector::Zero(x.size());
  for (int k = 0; k < n_constraints(); ++k) {
    row.setZero();
    rows_[k].add_subgrad(x, 1.0, row);
    J.row(k) = row;
  }
  return J;
}

CoupledProblem::CoupledProblem(std::vector<AgentSpec> agents, CommGraph graph, int m_constraints,
                               std::optional<Vector> slater_point, std::optional<Vector> initial_point)
    : agents_(std::move(agents)),
      graph_(std::move(graph)),
      m_(m_constraints),
      slater_(std::move(slater_point)),
      x0_(std::move(initial_point)) {
  if (agents_.empty()) throw std::invalid_argument("problem: no agents");
  if (static_cast<int>(agents_.size()) != graph_.n_nodes())
    throw std::invalid_argument("problem: agent count differs from graph node count");
  if (m_ <= 0) throw std::invalid_argument("problem: need at least one coupled constraint");
  total_dim_ = 0;
  for (const auto& a : agents_) {
    if (a.set.dimension() != a.dim)
      throw std::invalid_argument("problem: set dimension differs from agent dim");
    if (a.constraint.n_constraints() != m_)
      throw std::invalid_argument("problem: constraint row count differs from M");
    const int fd = a.cost.family().dimension();
    if (fd >= 0 && fd != a.dim) throw std::invalid_argument("problem: cost dimension differs from agent dim");
    for (const auto& row : a.constraint.rows()) {
      const int rd = row.dimension();
      if (rd >= 0 && rd != a.dim)
        throw std::invalid_argument("problem: constraint row dimension differs from agent dim");
    }
    offsets_.push_back(total_dim_);
    dims_.push_back(a.dim);
    total_dim_ += a.dim;
  }
  if (slater_ && slater_->size() != total_dim_)
    throw std::invalid_argument("problem: slater point has wrong stacked dimension");
  if (x0_ && x0_->size() != total_dim_)
    throw std::invalid_argument("problem: initial point has wrong stacked dimension");
}

std::vector<Vector> CoupledProblem::split_stacked(const Vector& x) const {
  if (x.size() != total_dim_) throw std::invalid_argument("split_stacked: wrong dimension");
  return split(x, dims_);
}

Vector CoupledProblem::coupled_value(const std::vector<Vector>& x) const {
  Vector g = Vector::Zero(m_);
  Vector gi(m_);
  for (int i = 0; i < n_agents(); ++i) {
    agents_[i].constraint.value_into(x[i], gi);
    g += gi;
  }
  return g;
}

double CoupledProblem::total_cost(const std::vector<Vector>& x) const {
  double s = 0.0;
  for (int i = 0; i < n_agents(); ++i) s += agents_[i].cost.value(x[i]);
  return s;
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

namespace {

bool set_bounded(const ConvexSet& set, std::string* why) {
  if (set.is_box() || set.is_ball()) return true;
  if (set.is_halfspaces()) return detail::bounded_certificate(set.as_halfspaces().rows, why);
  for (const auto& f : set.as_product().factors)
    if (!set_bounded(f, why)) return false;
  return true;
}

struct ConvexitySample {
  int failures = 0;
  int evaluated = 0;
  double worst_margin = 0.0;  // most negative slack seen
};

// Samples the convexity inequality f(y) >= f(x) + g(x)'(y - x) on random
// pairs from a slightly inflated bounding box of the agent's set. Pairs that
// leave the function domain are skipped.
ConvexitySample sample_convexity(const FunctionFamily& fn, const ConvexSet& set, int pairs, Rng& rng,
                                 double tol) {
  const auto [lo, hi] = set.bounding_box();
  const Vector pad = 0.05 * (hi - lo).cwiseAbs().cwiseMax(1e-6);
  const Vector slo = lo - pad, shi = hi + pad;
  ConvexitySample out;
  const int d = static_cast<int>(lo.size());
  for (int s = 0; s < pairs; ++s) {
    Vector x(d), y(d);
    for (int k = 0; k < d; ++k) {
      x[k] = rng.uniform(slo[k], shi[k]);
      y[k] = rng.uniform(slo[k], shi[k]);
    }
    try {
      const double fx = fn.eval(x), fy = fn.eval(y);
      const Vector gx = fn.subgrad(x);
      const double margin = fy - fx - gx.dot(y - x);
      ++out.evaluated;
      if (margin < -tol) {
        ++out.failures;
        out.worst_margin = std::min(out.worst_margin, margin);
      }
    } catch (const DomainError&) {
      // outside the log domain; not informative
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate(const CoupledProblem& problem, int sample_pairs, std::uint64_t seed) {
  ValidationReport report;
  auto add = [&](std::string name, bool ok, std::string detail) {
    report.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  const auto& graph = problem.graph();
  add("graph_connected", graph.connected(),
      graph.connected() ? "traversal reaches all nodes" : "graph is disconnected");

  bool dims_ok = static_cast<int>(problem.agents().size()) == graph.n_nodes();
  std::string dims_detail = "agents match graph nodes";
  for (const auto& a : problem.agents()) {
    if (a.set.dimension() != a.dim || a.constraint.n_constraints() != problem.m_constraints()) {
      dims_ok = false;
      dims_detail = "agent " + std::to_string(a.id + 1) + " has inconsistent dimensions";
      break;
    }
  }
  add("dimensions_consistent", dims_ok, dims_detail);

  for (const auto& a : problem.agents()) {
    std::string why;
    const bool ok = set_bounded(a.set, &why);
    add("set_bounded[" + std::to_string(a.id + 1) + "]", ok, ok ? "" : why);
  }

  const double tol = 1e-9;
  for (const auto& a : problem.agents()) {
    Rng rng(Rng::derive(seed, 17 * a.id + 1));
    const auto cost = sample_convexity(a.cost.family(), a.set, sample_pairs, rng, tol);
    add("cost_convexity_sampled[" + std::to_string(a.id + 1) + "]", cost.failures == 0,
        cost.failures == 0
            ? std::to_string(cost.evaluated) + " pairs ok"
            : std::to_string(cost.failures) + "/" + std::to_string(cost.evaluated) +
                  " pairs violate convexity (worst margin " + fmt(cost.worst_margin) + ")");
    int row_failures = 0, row_evaluated = 0;
    double worst = 0.0;
    for (const auto& row : a.constraint.rows()) {
      const auto r = sample_convexity(row, a.set, sample_pairs, rng, tol);
      row_failures += r.failures;
      row_evaluated += r.evaluated;
      worst = std::min(worst, r.worst_margin);
    }
    add("constraint_convexity_sampled[" + std::to_string(a.id + 1) + "]", row_failures == 0,
        row_failures == 0 ? std::to_string(row_evaluated) + " pairs ok"
                          : std::to_string(row_failures) + "/" + std::to_string(row_evaluated) +
                                " pairs violate convexity (worst margin " + fmt(worst) + ")");
  }

  if (problem.slater_point()) {
    const auto xbar = problem.split_stacked(*problem.slater_point());
    bool member = true;
    for (int i = 0; i < problem.n_agents(); ++i)
      member = member && problem.agent(i).set.contains(xbar[i], kFeasibilityTol);
    const Vector g = problem.coupled_value(xbar);
    const bool strict = (g.array() < 0.0).all();
    add("slater_point", member && strict,
        !member ? "point is outside the local sets"
                : (strict ? "strictly feasible, margin " + fmt(-g.maxCoeff())
                          : "coupled constraint not strictly negative (max component " + fmt(g.maxCoeff()) + ")"));
  }

  return report;
}

}  // namespace dpd
