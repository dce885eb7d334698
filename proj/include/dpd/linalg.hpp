// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <vector>

#include <Eigen/Core>

namespace dpd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Concatenates per-agent blocks into one stacked vector.
Vector stack(const std::vector<Vector>& parts);

/// Splits a stacked vector into blocks of the given sizes.
std::vector<Vector> split(const Vector& x, const std::vector<int>& dims);

inline double l1_norm(const Vector& v) { return v.lpNorm<1>(); }
inline double linf_norm(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace dpd
