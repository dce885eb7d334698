// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/geometry.hpp"

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "dpd/errors.hpp"
#include "dpd/rng.hpp"

namespace dpd {
namespace {

constexpr double kDykstraTol = 1e-10;
constexpr int kDykstraMaxSweeps = 10000;

void project_box(const ConvexSet::Box& b, const Vector& z, Vector& out) {
  out = z.cwiseMax(b.lower).cwiseMin(b.upper);
}

void project_ball(const ConvexSet::Ball& b, const Vector& z, Vector& out) {
  out = z - b.center;
  const double n = out.norm();
  if (n <= b.radius) {
    out = z;
  } else {
    out = b.center + (b.radius / n) * out;
  }
}

void project_halfspace(const Halfspace& r, const Vector& z, Vector& out) {
  const double viol = r.normal.dot(z) - r.offset;
  if (viol <= 0.0) {
    out = z;
  } else {
    out = z - (viol / r.normal.squaredNorm()) * r.normal;
  }
}

// Dykstra's alternating projections. Stopping is on the change of the
// correction vectors across a sweep (the iterate itself can plateau for many
// sweeps while corrections unwind, so its change is not a convergence
// signal). Returns the sweep count; throws NonConvergence past the cap.
int project_halfspaces(const std::vector<Halfspace>& rows, const Vector& z, Vector& out) {
  if (rows.size() == 1) {
    project_halfspace(rows.front(), z, out);
    return 0;
  }
  const auto m = rows.size();
  out = z;
  std::vector<Vector> corr(m, Vector::Zero(z.size()));
  Vector y(z.size()), moved(z.size());
  const double scale = std::max(1.0, z.norm());
  for (int sweep = 1; sweep <= kDykstraMaxSweeps; ++sweep) {
    double corr_change_sq = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      y = out + corr[r];
      project_halfspace(rows[r], y, out);
      moved = y - out;  // new correction
      corr_change_sq += (moved - corr[r]).squaredNorm();
      corr[r] = moved;
    }
    if (std::sqrt(corr_change_sq) < kDykstraTol * scale) return sweep;
  }
  throw NonConvergence("Dykstra exceeded " + std::to_string(kDykstraMaxSweeps) +
                       " sweeps; halfspace intersection is ill-posed");
}

// Exact projection onto a small halfspace intersection by active-set
// enumeration: for every independent row subset S of size <= dim, solve
//   x = z - A_S' (A_S A_S')^{-1} (A_S z - b_S)
// and keep the best candidate with nonnegative multipliers that satisfies
// every row. Cost grows combinatorially, so this is reserved for internal
// probes (boundedness certificate, bounding boxes) where the probe point is
// deliberately far away and Dykstra's sweep count would scale with the
// distance. Returns false when the subset budget is exhausted.
bool exact_polytope_project(const std::vector<Halfspace>& rows, const Vector& z, Vector& out) {
  const int m = static_cast<int>(rows.size());
  const int d = static_cast<int>(z.size());
  const int max_active = std::min(m, d);
  double combos = 1.0, total = 1.0;
  for (int k = 1; k <= max_active; ++k) {
    combos = combos * (m - k + 1) / k;
    total += combos;
  }
  if (total > 5000.0) return false;

  double best = std::numeric_limits<double>::infinity();
  Vector candidate(d);
  std::vector<int> subset;

  auto try_subset = [&]() {
    const int k = static_cast<int>(subset.size());
    if (k == 0) {
      bool feasible = true;
      for (const auto& r : rows) feasible = feasible && r.normal.dot(z) <= r.offset + 1e-9;
      if (feasible && 0.0 < best) {
        best = 0.0;
        out = z;
      }
      return;
    }
    Matrix A(k, d);
    Vector rhs(k);
    for (int i = 0; i < k; ++i) {
      A.row(i) = rows[subset[i]].normal;
      rhs[i] = rows[subset[i]].normal.dot(z) - rows[subset[i]].offset;
    }
    const Matrix gram = A * A.transpose();
    Eigen::FullPivLU<Matrix> lu(gram);
    if (lu.rank() < k) return;  // dependent normals; a smaller subset covers this face
    const Vector mu = lu.solve(rhs);
    if ((mu.array() < -1e-10).any()) return;
    candidate = z - A.transpose() * mu;
    const double dist = (z - candidate).squaredNorm();
    if (dist >= best) return;
    const double cscale = std::max(1.0, candidate.norm());
    for (const auto& r : rows)
      if (r.normal.dot(candidate) > r.offset + 1e-9 * cscale * std::max(1.0, r.normal.norm())) return;
    best = dist;
    out = candidate;
  };

  // Depth-first enumeration of subsets up to size max_active.
  std::function<void(int)> recurse = [&](int start) {
    try_subset();
    if (static_cast<int>(subset.size()) == max_active) return;
    for (int r = start; r < m; ++r) {
      subset.push_back(r);
      recurse(r + 1);
      subset.pop_back();
    }
  };
  recurse(0);
  return std::isfinite(best);
}

// Far-capable projection for internal probes: exact enumeration when the
// polytope is small, Dykstra otherwise.
void probe_project(const std::vector<Halfspace>& rows, const Vector& z, Vector& out) {
  if (exact_polytope_project(rows, z, out)) return;
  project_halfspaces(rows, z, out);
}

}  // namespace

namespace detail {

void project_into(const ConvexSet& set, const Vector& z, Vector& out) {
  if (set.is_box()) {
    project_box(set.as_box(), z, out);
  } else if (set.is_ball()) {
    project_ball(set.as_ball(), z, out);
  } else if (set.is_halfspaces()) {
    project_halfspaces(set.as_halfspaces().rows, z, out);
  } else {
    const auto& fs = set.as_product().factors;
    out.resize(z.size());
    int at = 0;
    Vector block;
    for (const auto& f : fs) {
      const int d = f.dimension();
      project_into(f, z.segment(at, d), block);
      out.segment(at, d) = block;
      at += d;
    }
  }
}

bool bounded_certificate(const std::vector<Halfspace>& rows, std::string* why) {
  const int d = static_cast<int>(rows.front().normal.size());
  double scale = 1.0;
  for (const auto& r : rows) scale = std::max(scale, std::abs(r.offset) / r.normal.norm());
  const double far = 1e6 * scale;

  Vector out;
  Rng rng(0x5e7cafeULL + static_cast<std::uint64_t>(rows.size()));
  for (int probe = 0; probe < 3 * d; ++probe) {
    Vector dir = rng.uniform_vector(d, -1.0, 1.0);
    if (probe < 2 * d) {  // deterministic axis probes first
      dir = Vector::Zero(d);
      dir[probe / 2] = (probe % 2 == 0) ? 1.0 : -1.0;
    }
    if (dir.norm() == 0.0) dir = Vector::Unit(d, 0);
    dir.normalize();
    try {
      probe_project(rows, far * dir, out);
    } catch (const NonConvergence&) {
      if (why) *why = "projection did not converge; intersection may be empty";
      return false;
    }
    if (out.norm() > 0.5 * far) {
      if (why) *why = "recession direction detected; set is unbounded";
      return false;
    }
    const double tol_scale = std::max(1.0, out.norm());
    for (const auto& r : rows) {
      if (r.normal.dot(out) > r.offset + 1e-6 * std::max(1.0, r.normal.norm()) * tol_scale) {
        if (why) *why = "projection lands outside all rows; intersection is empty";
        return false;
      }
    }
  }
  return true;
}

void support_bounds(const std::vector<Halfspace>& rows, Vector& lo, Vector& hi) {
  const int d = static_cast<int>(rows.front().normal.size());
  double scale = 1.0;
  for (const auto& r : rows) scale = std::max(scale, std::abs(r.offset) / r.normal.norm());
  const double far = 1e6 * scale;
  lo.resize(d);
  hi.resize(d);
  Vector probe = Vector::Zero(d), out(d);
  for (int k = 0; k < d; ++k) {
    probe.setZero();
    probe[k] = far;
    probe_project(rows, probe, out);
    hi[k] = out[k];
    probe[k] = -far;
    probe_project(rows, probe, out);
    lo[k] = out[k];
  }
}

}  // namespace detail

ProjectionResult project(const ConvexSet& set, const Vector& z) {
  if (z.size() != set.dimension()) throw std::invalid_argument("project: dimension mismatch");
  ProjectionResult res;
  if (set.is_halfspaces()) {
    res.iterations = project_halfspaces(set.as_halfspaces().rows, z, res.point);
  } else if (set.is_product()) {
    const auto& fs = set.as_product().factors;
    res.point.resize(z.size());
    int at = 0;
    for (const auto& f : fs) {
      const int d = f.dimension();
      ProjectionResult sub = project(f, z.segment(at, d));
      res.point.segment(at, d) = sub.point;
      res.iterations += sub.iterations;
      at += d;
    }
  } else {
    detail::project_into(set, z, res.point);
  }
  res.distance = (z - res.point).norm();
  return res;
}

Vector project_nonneg(const Vector& z) { return z.cwiseMax(0.0); }

Vector projected_step(const ConvexSet& set, const Vector& x, const Vector& direction, double h) {
  if (!set.contains(x, 1e-6))
    throw InfeasibleState("projected_step: base point violates set membership beyond 1e-6");
  return project(set, x + h * direction).point;
}

double set_distance(const ConvexSet& set, const Vector& z) { return project(set, z).distance; }

}  // namespace dpd
