#pragma once

#include <functional>

#include "flagflow/polynomial.hpp"

namespace flagflow {

/// Autonomous vector field on R^3 with an optional analytic Jacobian.
///
/// Evaluators may return non-finite values outside their domain; the
/// integrators treat that as a rejected step rather than an error.
struct VectorField {
  std::function<Vec3(const Vec3&)> rhs;
  std::function<Mat3(const Vec3&)> jacobian;

  Vec3 operator()(const Vec3& x) const { return rhs(x); }

  /// Analytic Jacobian when available, else central differences.
  Mat3 jacobian_at(const Vec3& x, double h = 1e-6) const;

  static VectorField from_poly(PolyField3 field);
  static VectorField linear(const Mat3& a);
};

}  // namespace flagflow
