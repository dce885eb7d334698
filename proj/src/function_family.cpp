// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/function_family.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dpd/errors.hpp"

namespace dpd {

Vector SubdiffSet::min_norm_element() const {
  // Clamp the base toward zero within the interval box, then shrink the
  // remainder by the ball radius. Both reductions are exact for Minkowski
  // sums of a point, a box and a centered ball.
  Vector u = base + (-base).cwiseMax(lo).cwiseMin(hi);
  const double n = u.norm();
  if (n <= radius) return Vector::Zero(base.size());
  return u * (1.0 - radius / n);
}

FunctionFamily FunctionFamily::quadratic_form(Matrix A, Vector b, double c) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("quadratic_form: shape mismatch");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("quadratic_form: A must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw std::invalid_argument("quadratic_form: A must be positive semidefinite");
  return FunctionFamily(QuadraticForm{std::move(A), std::move(b), c});
}

FunctionFamily FunctionFamily::euclidean_norm(double weight) {
  if (weight < 0.0) throw std::invalid_argument("euclidean_norm: weight must be >= 0");
  return FunctionFamily(EuclideanNorm{weight});
}

FunctionFamily FunctionFamily::abs_deviation(double scale, Vector center) {
  if (scale < 0.0) throw std::invalid_argument("abs_deviation: scale must be >= 0");
  if (center.size() == 0) throw std::invalid_argument("abs_deviation: empty center");
  return FunctionFamily(AbsDeviation{scale, std::move(center)});
}

FunctionFamily FunctionFamily::log_affine(Vector b) {
  if (b.size() == 0) throw std::invalid_argument("log_affine: empty coefficient");
  for (int k = 0; k < b.size(); ++k)
    if (b[k] < 0.0) throw std::invalid_argument("log_affine: coefficients must be >= 0");
  return FunctionFamily(LogAffine{std::move(b)});
}

FunctionFamily FunctionFamily::affine(Vector p, double q) {
  if (p.size() == 0) throw std::invalid_argument("affine: empty linear part");
  return FunctionFamily(Affine{std::move(p), q});
}

FunctionFamily FunctionFamily::sum(std::vector<FunctionFamily> terms) {
  if (terms.empty()) throw std::invalid_argument("sum: no terms");
  std::vector<FunctionFamily> flat;
  for (auto& t : terms) {
    if (t.is_sum()) {
      for (auto& inner : std::get<Sum>(t.rep_).terms) flat.push_back(std::move(inner));
    } else {
      flat.push_back(std::move(t));
    }
  }
  int dim = -1;
  for (const auto& t : flat) {
    const int d = t.dimension();
    if (d < 0) continue;
    if (dim < 0) dim = d;
    if (d != dim) throw std::invalid_argument("sum: term dimensions disagree");
  }
  if (flat.size() == 1) return std::move(flat.front());
  return FunctionFamily(Sum{std::move(flat)});
}

int FunctionFamily::dimension() const {
  if (is_quadratic_form()) return static_cast<int>(as_quadratic_form().b.size());
  if (is_euclidean_norm()) return -1;
  if (is_abs_deviation()) return static_cast<int>(as_abs_deviation().center.size());
  if (is_log_affine()) return static_cast<int>(as_log_affine().b.size());
  if (is_affine()) return static_cast<int>(as_affine().p.size());
  int dim = -1;
  for (const auto& t : as_sum().terms)
    if (t.dimension() >= 0) dim = t.dimension();
  return dim;
}

void FunctionFamily::check_dim(const Vector& x) const {
  const int d = dimension();
  if (d >= 0 && x.size() != d) throw std::invalid_argument("function evaluated at wrong dimension");
}

double FunctionFamily::eval(const Vector& x) const {
  check_dim(x);
  if (is_quadratic_form()) {
    const auto& f = as_quadratic_form();
    return x.dot(f.A * x) + f.b.dot(x) + f.c;
  }
  if (is_euclidean_norm()) return as_euclidean_norm().weight * x.norm();
  if (is_abs_deviation()) {
    const auto& f = as_abs_deviation();
    return f.scale * (x - f.center).lpNorm<1>();
  }
  if (is_log_affine()) {
    const double arg = 1.0 + as_log_affine().b.dot(x);
    if (arg <= 0.0) throw DomainError("log_affine: argument 1 + b'x <= 0");
    return std::log(arg);
  }
  if (is_affine()) return as_affine().p.dot(x) + as_affine().q;
  double s = 0.0;
  for (const auto& t : as_sum().terms) s += t.eval(x);
  return s;
}

void FunctionFamily::add_subgrad(const Vector& x, double scale, Vector& acc) const {
  if (is_quadratic_form()) {
    const auto& f = as_quadratic_form();
    acc.noalias() += scale * (2.0 * (f.A * x) + f.b);
    return;
  }
  if (is_euclidean_norm()) {
    const double n = x.norm();
    if (n > 0.0) acc += (scale * as_euclidean_norm().weight / n) * x;
    return;  // minimal-norm selection 0 at the origin
  }
  if (is_abs_deviation()) {
    const auto& f = as_abs_deviation();
    for (int k = 0; k < x.size(); ++k) {
      const double dk = x[k] - f.center[k];
      if (dk > 0.0) acc[k] += scale * f.scale;
      else if (dk < 0.0) acc[k] -= scale * f.scale;
      // 0 at ties
    }
    return;
  }
  if (is_log_affine()) {
    const auto& f = as_log_affine();
    const double arg = 1.0 + f.b.dot(x);
    if (arg <= 0.0) throw DomainError("log_affine: argument 1 + b'x <= 0");
    acc += (scale / arg) * f.b;
    return;
  }
  if (is_affine()) {
    acc += scale * as_affine().p;
    return;
  }
  for (const auto& t : as_sum().terms) t.add_subgrad(x, scale, acc);
}

Vector FunctionFamily::subgrad(const Vector& x) const {
  check_dim(x);
  Vector g = Vector::Zero(x.size());
  add_subgrad(x, 1.0, g);
  return g;
}

void FunctionFamily::add_subdiff(const Vector& x, double scale, SubdiffSet& out) const {
  if (is_euclidean_norm()) {
    const double n = x.norm();
    if (n > 0.0) {
      out.base += (scale * as_euclidean_norm().weight / n) * x;
    } else {
      out.radius += std::abs(scale) * as_euclidean_norm().weight;
    }
    return;
  }
  if (is_abs_deviation()) {
    const auto& f = as_abs_deviation();
    const double w = scale * f.scale;
    for (int k = 0; k < x.size(); ++k) {
      const double dk = x[k] - f.center[k];
      if (dk > 0.0) out.base[k] += w;
      else if (dk < 0.0) out.base[k] -= w;
      else {
        out.lo[k] -= std::abs(w);
        out.hi[k] += std::abs(w);
      }
    }
    return;
  }
  if (is_sum()) {
    for (const auto& t : as_sum().terms) t.add_subdiff(x, scale, out);
    return;
  }
  add_subgrad(x, scale, out.base);  // smooth atoms contribute a point
}

bool FunctionFamily::differentiable_at(const Vector& x, double margin) const {
  if (is_euclidean_norm()) return as_euclidean_norm().weight == 0.0 || x.norm() > margin;
  if (is_abs_deviation()) {
    const auto& f = as_abs_deviation();
    if (f.scale == 0.0) return true;
    return ((x - f.center).cwiseAbs().array() > margin).all();
  }
  if (is_log_affine()) return 1.0 + as_log_affine().b.dot(x) > margin;
  if (is_sum()) {
    for (const auto& t : as_sum().terms)
      if (!t.differentiable_at(x, margin)) return false;
    return true;
  }
  return true;
}

std::optional<std::pair<Vector, double>> FunctionFamily::affine_parts(int dim) const {
  if (is_affine()) return std::make_pair(as_affine().p, as_affine().q);
  if (is_quadratic_form()) {
    const auto& f = as_quadratic_form();
    if (f.A.cwiseAbs().maxCoeff() == 0.0) return std::make_pair(f.b, f.c);
    return std::nullopt;
  }
  if (is_euclidean_norm() && as_euclidean_norm().weight == 0.0)
    return std::make_pair(Vector::Zero(dim), 0.0);
  if (is_abs_deviation() && as_abs_deviation().scale == 0.0)
    return std::make_pair(Vector::Zero(dim), 0.0);
  if (is_log_affine() && as_log_affine().b.cwiseAbs().maxCoeff() == 0.0)
    return std::make_pair(Vector::Zero(dim), 0.0);
  if (is_sum()) {
    Vector p = Vector::Zero(dim);
    double q = 0.0;
    for (const auto& t : as_sum().terms) {
      const auto part = t.affine_parts(dim);
      if (!part) return std::nullopt;
      p += part->first;
      q += part->second;
    }
    return std::make_pair(std::move(p), q);
  }
  return std::nullopt;
}

}  // namespace dpd
