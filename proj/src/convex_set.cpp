// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/convex_set.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dpd/geometry.hpp"

namespace dpd {

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw std::invalid_argument("box: bound dimensions mismatch");
  for (int k = 0; k < lower.size(); ++k)
    if (!(lower[k] <= upper[k])) throw std::invalid_argument("box: lower > upper at coordinate " + std::to_string(k));
  return ConvexSet(Box{std::move(lower), std::move(upper)});
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ball: empty center");
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
  return ConvexSet(Ball{std::move(center), radius});
}

ConvexSet ConvexSet::halfspaces(std::vector<Halfspace> rows) {
  if (rows.empty()) throw std::invalid_argument("halfspaces: no rows");
  const auto dim = rows.front().normal.size();
  if (dim == 0) throw std::invalid_argument("halfspaces: empty normal");
  for (const auto& r : rows) {
    if (r.normal.size() != dim) throw std::invalid_argument("halfspaces: inconsistent row dimensions");
    if (r.normal.norm() == 0.0) throw std::invalid_argument("halfspaces: zero normal row");
  }
  std::string why;
  if (!detail::bounded_certificate(rows, &why))
    throw std::invalid_argument("halfspaces: certificate failed (" + why + ")");
  return ConvexSet(Halfspaces{std::move(rows)});
}

ConvexSet ConvexSet::product(std::vector<ConvexSet> factors) {
  if (factors.empty()) throw std::invalid_argument("product: no factors");
  return ConvexSet(Product{std::move(factors)});
}

int ConvexSet::dimension() const {
  if (is_box()) return static_cast<int>(as_box().lower.size());
  if (is_ball()) return static_cast<int>(as_ball().center.size());
  if (is_halfspaces()) return static_cast<int>(as_halfspaces().rows.front().normal.size());
  int d = 0;
  for (const auto& f : as_product().factors) d += f.dimension();
  return d;
}

bool ConvexSet::contains(const Vector& x, double tol) const {
  if (x.size() != dimension()) return false;
  if (is_box()) {
    const auto& b = as_box();
    for (int k = 0; k < x.size(); ++k)
      if (x[k] < b.lower[k] - tol || x[k] > b.upper[k] + tol) return false;
    return true;
  }
  if (is_ball()) {
    const auto& b = as_ball();
    return (x - b.center).norm() <= b.radius + tol;
  }
  if (is_halfspaces()) {
    for (const auto& r : as_halfspaces().rows)
      if (r.normal.dot(x) > r.offset + tol * std::max(1.0, r.normal.norm())) return false;
    return true;
  }
  int at = 0;
  for (const auto& f : as_product().factors) {
    const int d = f.dimension();
    if (!f.contains(x.segment(at, d), tol)) return false;
    at += d;
  }
  return true;
}

std::pair<Vector, Vector> ConvexSet::bounding_box() const {
  if (is_box()) return {as_box().lower, as_box().upper};
  if (is_ball()) {
    const auto& b = as_ball();
    return {b.center.array() - b.radius, b.center.array() + b.radius};
  }
  if (is_halfspaces()) {
    // Per-axis support points from far projections (exact for small row
    // counts); padded because support-by-projection is exact only in the
    // far limit.
    Vector lo, hi;
    detail::support_bounds(as_halfspaces().rows, lo, hi);
    const Vector pad = 1e-3 * (hi - lo).cwiseAbs().cwiseMax(1e-9);
    return {lo - pad, hi + pad};
  }
  const auto& fs = as_product().factors;
  Vector lo(dimension()), hi(dimension());
  int at = 0;
  for (const auto& f : fs) {
    const auto [flo, fhi] = f.bounding_box();
    lo.segment(at, f.dimension()) = flo;
    hi.segment(at, f.dimension()) = fhi;
    at += f.dimension();
  }
  return {lo, hi};
}

}  // namespace dpd
