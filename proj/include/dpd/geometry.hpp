// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include "dpd/convex_set.hpp"
#include "dpd/linalg.hpp"

namespace dpd {

struct ProjectionResult {
  Vector point;
  double distance = 0.0;  // ||input - point||
  int iterations = 0;     // 0 for closed-form paths
};

// Euclidean projection onto the set. Box, ball and single halfspaces are
// closed-form; halfspace intersections run Dykstra's alternating projections
// (plain POCS would return a feasible point, not the projection) to 1e-10,
// at most 10,000 sweeps; products project blockwise.
// Throws NonConvergence if Dykstra stalls above tolerance.
ProjectionResult project(const ConvexSet& set, const Vector& z);

/// Componentwise max(z, 0): projection onto the nonnegative orthant.
Vector project_nonneg(const Vector& z);

// One explicit step followed by projection: project(set, x + h*direction).
// This is the discrete surrogate for velocity projection onto the tangent
// cone; the two coincide in the h -> 0 limit. Requires x in the set within
// 1e-6 (throws InfeasibleState otherwise, signalling integrator drift).
Vector projected_step(const ConvexSet& set, const Vector& x, const Vector& direction, double h);

/// Distance from z to the set (projection by-product).
double set_distance(const ConvexSet& set, const Vector& z);

namespace detail {

/// In-place projection used by the integrator hot loop; `out` is overwritten.
void project_into(const ConvexSet& set, const Vector& z, Vector& out);

// Sampling certificate for halfspace intersections: projects far points from
// random directions and checks the images stay near the origin-scale of the
// rows. Returns false when a recession direction is detected or the
// intersection appears empty.
bool bounded_certificate(const std::vector<Halfspace>& rows, std::string* why = nullptr);

/// Per-axis support estimates of a (certified bounded) halfspace
/// intersection via far-point projections.
void support_bounds(const std::vector<Halfspace>& rows, Vector& lo, Vector& hi);

}  // namespace detail

}  // namespace dpd
