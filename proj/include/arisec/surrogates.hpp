// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

// First-order bounds used by the SCA subproblems. Each is tight at its expansion point.

#pragma once

#include <cmath>

#include "arisec/types.hpp"

namespace arisec {

/// Upper bound of the concave x - x^2 by its tangent at x0.
inline double penalty_upper(double x0, double x) { return (1.0 - 2.0 * x0) * x + x0 * x0; }

/// Upper bound of the concave ln(x) by its tangent at x0 > 0.
inline double log_upper(double x0, double x) { return std::log(x0) + (x - x0) / x0; }

/// Lower bound of the convex x^p (p < 0 or p > 1) by its tangent at x0 > 0.
inline double power_lower(double x0, double p, double x) {
  return std::pow(x0, p) + p * std::pow(x0, p - 1.0) * (x - x0);
}

/// Lower bound of the convex a^T M a (M symmetric PSD) by its tangent at a0.
inline double quad_lower(const RMatrix& M, const RVector& a0, const RVector& a) {
  return 2.0 * a0.dot(M * a) - a0.dot(M * a0);
}

}  // namespace arisec
