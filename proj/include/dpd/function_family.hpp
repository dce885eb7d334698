// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "dpd/linalg.hpp"

namespace dpd {

// Exact representation of the subdifferential of a sum of the supported
// atoms at a point: base + [lo, hi] (componentwise Minkowski box from
// absolute-value kinks) + ball(radius) (from Euclidean-norm kinks at the
// origin). Scaling and summing stay within this class of sets.
struct SubdiffSet {
  Vector base;
  Vector lo, hi;  // interval offsets, lo <= 0 <= hi
  double radius = 0.0;

  explicit SubdiffSet(int dim)
      : base(Vector::Zero(dim)), lo(Vector::Zero(dim)), hi(Vector::Zero(dim)) {}

  /// Minimal-norm element of the set (exact: clamp within the box, then shrink by the ball).
  Vector min_norm_element() const;

  /// Distance from the origin to the set.
  double distance_to_zero() const { return min_norm_element().norm(); }
};

// Closed enumeration of the function atoms used by costs and constraint
// rows. A closed enumeration (rather than arbitrary closures) keeps
// instances serializable and lets tests locate kinks exactly.
class FunctionFamily {
 public:
  struct QuadraticForm {  // x'Ax + b'x + c, A symmetric PSD
    Matrix A;
    Vector b;
    double c = 0.0;
  };
  struct EuclideanNorm {  // w * ||x||_2, dimension-agnostic
    double weight = 1.0;
  };
  struct AbsDeviation {  // c * |x - d|_1
    double scale = 1.0;
    Vector center;
  };
  struct LogAffine {  // ln(1 + b'x), domain 1 + b'x > 0; concave for b != 0
    Vector b;
  };
  struct Affine {  // p'x + q
    Vector p;
    double q = 0.0;
  };
  struct Sum {
    std::vector<FunctionFamily> terms;  // flat: no nested sums
  };

  static FunctionFamily quadratic_form(Matrix A, Vector b, double c);
  static FunctionFamily euclidean_norm(double weight);
  static FunctionFamily abs_deviation(double scale, Vector center);
  static FunctionFamily log_affine(Vector b);
  static FunctionFamily affine(Vector p, double q);
  static FunctionFamily sum(std::vector<FunctionFamily> terms);  // flattens nested sums

  /// Fixed dimension, or -1 when dimension-agnostic (pure EuclideanNorm terms).
  int dimension() const;

  double eval(const Vector& x) const;

  // A selection from the (convex or Clarke) subdifferential; at kinks the
  // minimal-norm element per atom is chosen: 0 for EuclideanNorm at the
  // origin, 0 per coordinate for AbsDeviation at x_k == d_k. That choice
  // makes consensus states equilibria of the dual dynamics.
  Vector subgrad(const Vector& x) const;

  /// acc += scale * subgrad(x); allocation-free inner-loop path.
  void add_subgrad(const Vector& x, double scale, Vector& acc) const;

  /// Accumulates scale * (exact subdifferential set at x) into `out`.
  void add_subdiff(const Vector& x, double scale, SubdiffSet& out) const;

  /// True when every coordinate is at least `margin` away from a kink and
  /// the point is interior to the domain.
  bool differentiable_at(const Vector& x, double margin) const;

  /// (p, q) of the global affine map, when the family is affine.
  std::optional<std::pair<Vector, double>> affine_parts(int dim) const;

  bool is_quadratic_form() const { return std::holds_alternative<QuadraticForm>(rep_); }
  const QuadraticForm& as_quadratic_form() const { return std::get<QuadraticForm>(rep_); }
  bool is_euclidean_norm() const { return std::holds_alternative<EuclideanNorm>(rep_); }
  const EuclideanNorm& as_euclidean_norm() const { return std::get<EuclideanNorm>(rep_); }
  bool is_abs_deviation() const { return std::holds_alternative<AbsDeviation>(rep_); }
  const AbsDeviation& as_abs_deviation() const { return std::get<AbsDeviation>(rep_); }
  bool is_log_affine() const { return std::holds_alternative<LogAffine>(rep_); }
  const LogAffine& as_log_affine() const { return std::get<LogAffine>(rep_); }
  bool is_affine() const { return std::holds_alternative<Affine>(rep_); }
  const Affine& as_affine() const { return std::get<Affine>(rep_); }
  bool is_sum() const { return std::holds_alternative<Sum>(rep_); }
  const Sum& as_sum() const { return std::get<Sum>(rep_); }

 private:
  std::variant<QuadraticForm, EuclideanNorm, AbsDeviation, LogAffine, Affine, Sum> rep_;
  explicit FunctionFamily(std::variant<QuadraticForm, EuclideanNorm, AbsDeviation, LogAffine, Affine, Sum> rep)
      : rep_(std::move(rep)) {}
  void check_dim(const Vector& x) const;
};

}  // namespace dpd
