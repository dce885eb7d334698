// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "dpd/linalg.hpp"

namespace dpd {

/// Closed halfspace { x : normal.dot(x) <= offset }.
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

// Compact convex local constraint set with closed-form or iterative
// Euclidean projection support. Instances are immutable after construction
// and safe to share across threads.
class ConvexSet {
 public:
  struct Box {
    Vector lower, upper;
  };
  struct Ball {
    Vector center;
    double radius;
  };
  struct Halfspaces {
    std::vector<Halfspace> rows;
  };
  struct Product {
    std::vector<ConvexSet> factors;
  };

  /// Axis-aligned box; requires lower <= upper componentwise.
  static ConvexSet box(Vector lower, Vector upper);

  /// Euclidean ball; requires radius > 0.
  static ConvexSet ball(Vector center, double radius);

  // Intersection of halfspaces. The builder asserts boundedness with a
  // sampling certificate (projections of far points must land near the set);
  // an unbounded or empty description is rejected here, not at solve time.
  static ConvexSet halfspaces(std::vector<Halfspace> rows);

  /// Cartesian product of factor sets; projections act blockwise.
  static ConvexSet product(std::vector<ConvexSet> factors);

  int dimension() const;
  bool contains(const Vector& x, double tol) const;

  /// Axis-aligned bounding box (exact for box/ball/product, estimated via
  /// support-point projections for halfspace intersections).
  std::pair<Vector, Vector> bounding_box() const;

  bool is_box() const { return std::holds_alternative<Box>(rep_); }
  const Box& as_box() const { return std::get<Box>(rep_); }
  bool is_ball() const { return std::holds_alternative<Ball>(rep_); }
  const Ball& as_ball() const { return std::get<Ball>(rep_); }
  bool is_halfspaces() const { return std::holds_alternative<Halfspaces>(rep_); }
  const Halfspaces& as_halfspaces() const { return std::get<Halfspaces>(rep_); }
  bool is_product() const { return std::holds_alternative<Product>(rep_); }
  const Product& as_product() const { return std::get<Product>(rep_); }

 private:
  std::variant<Box, Ball, Halfspaces, Product> rep_;
  explicit ConvexSet(std::variant<Box, Ball, Halfspaces, Product> rep) : rep_(std::move(rep)) {}
};

/// Membership tolerance used by state invariants and projections.
inline constexpr double kFeasibilityTol = 1e-9;

}  // namespace dpd
