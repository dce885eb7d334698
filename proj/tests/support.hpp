// Copyright (c) dpdopt contributors. Apache-2.0 license.
//
// Shared helpers for the test suites: independent brute-force oracles,
// random set/point generators, and finite differences. Everything here is
// deliberately implementation-independent of the library paths it checks.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dpd/convex_set.hpp"
#include "dpd/function_family.hpp"
#include "dpd/problem.hpp"
#include "dpd/rng.hpp"

namespace dpd::testing {

/// Central finite-difference gradient with step 1e-6.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double step = 1e-6) {
  Vector g(x.size());
  Vector e = x;
  for (int k = 0; k < x.size(); ++k) {
    e[k] = x[k] + step;
    const double up = f(e);
    e[k] = x[k] - step;
    const double dn = f(e);
    e[k] = x[k];
    g[k] = (up - dn) / (2.0 * step);
  }
  return g;
}

/// Dense-grid argmin of ||p - z|| over a 2-D polytope given by halfspaces.
inline Vector grid_project_polytope(const std::vector<Halfspace>& rows, const Vector& z, double lo0,
                                    double hi0, double lo1, double hi1, double step) {
  Vector best(2);
  double best_d = std::numeric_limits<double>::infinity();
  Vector p(2);
  for (double a = lo0; a <= hi0 + 1e-12; a += step) {
    for (double b = lo1; b <= hi1 + 1e-12; b += step) {
      p << a, b;
      bool ok = true;
      for (const auto& r : rows) ok = ok && (r.normal.dot(p) <= r.offset + 1e-12);
      if (!ok) continue;
      const double d = (p - z).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = p;
      }
    }
  }
  return best;
}

// Dense-grid minimizer of sum_i f_i subject to sum_i g_i <= 0 for one or two
// scalar agents on boxes. Resolution `step`; ties resolved toward the first
// hit. Used as the desk-scale optimum oracle.
inline std::vector<Vector> grid_minimize_scalar(const CoupledProblem& problem, double step) {
  const int n = problem.n_agents();
  std::vector<double> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    const auto bb = problem.agent(i).set.bounding_box();
    lo[i] = bb.first[0];
    hi[i] = bb.second[0];
  }
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Vector> best(n, Vector::Zero(1));
  std::vector<Vector> x(n, Vector::Zero(1));
  auto consider = [&] {
    Vector g = problem.coupled_value(x);
    if ((g.array() > 1e-9).any()) return;
    const double v = problem.total_cost(x);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  };
  if (n == 1) {
    for (double a = lo[0]; a <= hi[0] + 1e-12; a += step) {
      x[0][0] = a;
      consider();
    }
  } else if (n == 2) {
    for (double a = lo[0]; a <= hi[0] + 1e-12; a += step) {
      for (double b = lo[1]; b <= hi[1] + 1e-12; b += step) {
        x[0][0] = a;
        x[1][0] = b;
        consider();
      }
    }
  } else {
    throw std::logic_error("grid oracle supports one or two scalar agents");
  }
  return best;
}

/// Random compact convex set of the given dimension (all four variants).
inline ConvexSet random_set(Rng& rng, int dim) {
  const int kind = static_cast<int>(rng.below(4));
  if (kind == 0) {
    Vector lo = rng.uniform_vector(dim, -3.0, 1.0);
    Vector hi = lo + rng.uniform_vector(dim, 0.1, 4.0);
    return ConvexSet::box(lo, hi);
  }
  if (kind == 1) {
    return ConvexSet::ball(rng.uniform_vector(dim, -2.0, 2.0), rng.uniform(0.2, 3.0));
  }
  if (kind == 2) {
    // Bounding box rows keep it compact; extra random cuts through an
    // interior point keep it nonempty.
    Vector lo = rng.uniform_vector(dim, -3.0, 0.0);
    Vector hi = lo + rng.uniform_vector(dim, 0.5, 4.0);
    std::vector<Halfspace> rows;
    for (int k = 0; k < dim; ++k) {
      Vector up = Vector::Zero(dim), dn = Vector::Zero(dim);
      up[k] = 1.0;
      dn[k] = -1.0;
      rows.push_back({up, hi[k]});
      rows.push_back({dn, -lo[k]});
    }
    const Vector center = 0.5 * (lo + hi);
    const int cuts = static_cast<int>(rng.below(3));
    for (int c = 0; c < cuts; ++c) {
      Vector normal = rng.uniform_vector(dim, -1.0, 1.0);
      if (normal.norm() < 1e-6) normal[0] = 1.0;
      rows.push_back({normal, normal.dot(center) + rng.uniform(0.05, 1.0) * normal.norm()});
    }
    return ConvexSet::halfspaces(rows);
  }
  const int d1 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(dim)));
  if (d1 >= dim) return ConvexSet::ball(rng.uniform_vector(dim, -1.0, 1.0), rng.uniform(0.5, 2.0));
  std::vector<ConvexSet> factors;
  factors.push_back(random_set(rng, d1));
  factors.push_back(random_set(rng, dim - d1));
  return ConvexSet::product(std::move(factors));
}

/// Random point in a moderately inflated neighborhood of the set.
inline Vector random_point_near(Rng& rng, const ConvexSet& set, double inflate = 2.0) {
  const auto [lo, hi] = set.bounding_box();
  const Vector c = 0.5 * (lo + hi);
  const Vector half = (0.5 * (hi - lo)).cwiseMax(0.1);
  Vector p(set.dimension());
  for (int k = 0; k < p.size(); ++k) p[k] = c[k] + inflate * half[k] * rng.uniform(-1.0, 1.0);
  return p;
}

/// Random function family over R^dim (excluding LogAffine, which is concave).
inline FunctionFamily random_convex_family(Rng& rng, int dim) {
  const int kind = static_cast<int>(rng.below(5));
  switch (kind) {
    case 0: {
      Matrix R(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) R(r, c) = rng.uniform(-1.0, 1.0);
      Matrix A = R.transpose() * R;  // PSD by construction
      return FunctionFamily::quadratic_form(A, rng.uniform_vector(dim, -2.0, 2.0),
                                            rng.uniform(-1.0, 1.0));
    }
    case 1:
      return FunctionFamily::euclidean_norm(rng.uniform(0.0, 3.0));
    case 2:
      return FunctionFamily::abs_deviation(rng.uniform(0.0, 2.0), rng.uniform_vector(dim, -1.0, 1.0));
    case 3:
      return FunctionFamily::affine(rng.uniform_vector(dim, -2.0, 2.0), rng.uniform(-1.0, 1.0));
    default: {
      std::vector<FunctionFamily> terms;
      const int k = 2 + static_cast<int>(rng.below(2));
      for (int t = 0; t < k; ++t) {
        const int sub = static_cast<int>(rng.below(4));
        Rng sub_rng(Rng::derive(rng.below(1ULL << 62), static_cast<std::uint64_t>(sub)));
        switch (sub) {
          case 0:
            terms.push_back(FunctionFamily::euclidean_norm(sub_rng.uniform(0.0, 2.0)));
            break;
          case 1:
            terms.push_back(
                FunctionFamily::abs_deviation(sub_rng.uniform(0.0, 2.0), sub_rng.uniform_vector(dim, -1.0, 1.0)));
            break;
          case 2:
            terms.push_back(
                FunctionFamily::affine(sub_rng.uniform_vector(dim, -2.0, 2.0), sub_rng.uniform(-1.0, 1.0)));
            break;
          default: {
            Matrix R(dim, dim);
            for (int r = 0; r < dim; ++r)
              for (int c = 0; c < dim; ++c) R(r, c) = sub_rng.uniform(-1.0, 1.0);
            terms.push_back(FunctionFamily::quadratic_form(R.transpose() * R,
                                                           sub_rng.uniform_vector(dim, -1.0, 1.0), 0.0));
          }
        }
      }
      return FunctionFamily::sum(std::move(terms));
    }
  }
}

/// One-agent problem builder for scalar desk instances.
inline CoupledProblem scalar_problem(std::vector<FunctionFamily> costs,
                                     std::vector<std::vector<FunctionFamily>> rows, double lo,
                                     double hi, std::vector<std::pair<int, int>> edges = {}) {
  const int n = static_cast<int>(costs.size());
  const int m = static_cast<int>(rows.front().size());
  std::vector<AgentSpec> agents;
  for (int i = 0; i < n; ++i) {
    agents.push_back(AgentSpec{i, ConvexSet::box(Vector::Constant(1, lo), Vector::Constant(1, hi)),
                               CostOracle(std::move(costs[i])), ConstraintOracle(std::move(rows[i])), 1});
  }
  CommGraph graph(n, edges);
  return CoupledProblem(std::move(agents), std::move(graph), m);
}

}  // namespace dpd::testing
