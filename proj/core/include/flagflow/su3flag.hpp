#pragma once

// Invariant metrics on the full flag manifold SU(3)/T and the two forms of
// their Ricci flow: the geometric system l' = -2 Ric(l) and the quadratic
// polynomial system obtained after multiplying by 12 * l12 * l13 * l23 and
// reversing time.

#include <array>

#include "flagflow/polynomial.hpp"
#include "flagflow/vector_field.hpp"

namespace flagflow::su3 {

/// Invariant metric (l12, l13, l23); every scale strictly positive.
class MetricParams {
public:
  /// Throws std::domain_error unless all components are positive and finite.
  MetricParams(double l12, double l13, double l23);
  explicit MetricParams(const Vec3& v) : MetricParams(v[0], v[1], v[2]) {}

  double l12() const { return v_[0]; }
  double l13() const { return v_[1]; }
  double l23() const { return v_[2]; }
  const Vec3& vector() const { return v_; }

private:
  Vec3 v_;
};

struct RicciComponents {
  double r12 = 0.0;
  double r13 = 0.0;
  double r23 = 0.0;

  Vec3 vector() const { return {r12, r13, r23}; }
};

/// Selects one of the four invariant rays gamma_1..gamma_4 in the open first octant.
class LineId {
public:
  /// Throws std::out_of_range unless 1 <= index <= 4.
  explicit LineId(int index);
  int index() const { return index_; }

private:
  int index_;
};

RicciComponents ricci_components(const MetricParams& m);

/// l' = -2 r(l).
Vec3 flow_rhs(const MetricParams& m);

/// Quadratic system, defined on all of R^3.
Vec3 poly_rhs(const Vec3& x);
Mat3 poly_jacobian(const Vec3& x);

/// The quadratic system as an explicit polynomial field (degree 2).
const PolyField3& poly_field();

/// l' = -2 r(l) as a VectorField; evaluates to NaN off the open octant.
VectorField ricci_flow_field();
/// Quadratic system as a VectorField with analytic Jacobian.
VectorField poly_flow_field();

/// max_i |poly_rhs(m)_i - 12 l12 l13 l23 r_i(m)|.
double reparam_check(const MetricParams& m);

/// Unit vectors p'_1..p'_4 (closed forms in sqrt(2)).
const std::array<Vec3, 4>& invariant_directions();
const Vec3& invariant_direction(LineId j);

/// |X(d) - (X(d).d) d| for the quadratic field X; zero iff the ray through d
/// is invariant. Throws std::invalid_argument unless |d| = 1 within 1e-12.
double tangency_defect(const Vec3& d);

struct EinsteinFit {
  double c = 0.0;         ///< least-squares Einstein constant <r, m> / <m, m>
  double residual = 0.0;  ///< max_i |r_i - c m_i|
};

EinsteinFit einstein_residual(const MetricParams& m);

}  // namespace flagflow::su3
