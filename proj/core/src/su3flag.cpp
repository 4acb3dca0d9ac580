#include "flagflow/su3flag.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flagflow::su3 {

namespace {

// Ricci components with no domain check; callers validate.
Vec3 ricci_unchecked(double a, double b, double c) {
  const double r12 = 1.0 / (2.0 * a) + (a / (b * c) - b / (a * c) - c / (a * b)) / 12.0;
  const double r13 = 1.0 / (2.0 * b) + (b / (a * c) - a / (b * c) - c / (a * b)) / 12.0;
  const double r23 = 1.0 / (2.0 * c) + (c / (a * b) - b / (c * a) - a / (c * b)) / 12.0;
  return {r12, r13, r23};
}

bool in_open_octant(const Vec3& x) {
  return x.allFinite() && x[0] > 0.0 && x[1] > 0.0 && x[2] > 0.0;
}

PolyField3 build_poly_field() {
  // P1 = 6 x2 x3 + x1^2 - x2^2 - x3^2, and its two index permutations.
  auto p = [](int self, int o1, int o2) {
    Exponents cross{0, 0, 0};
    cross[static_cast<std::size_t>(o1)] = 1;
    cross[static_cast<std::size_t>(o2)] = 1;
    auto square = [](int i) {
      Exponents e{0, 0, 0};
      e[static_cast<std::size_t>(i)] = 2;
      return e;
    };
    return Polynomial3(std::vector<Monomial>{{6.0, cross}, {1.0, square(self)}, {-1.0, square(o1)}, {-1.0, square(o2)}});
  };
  return PolyField3({p(0, 1, 2), p(1, 0, 2), p(2, 0, 1)});
}

std::array<Vec3, 4> build_directions() {
  const double s = 2.0 + 2.0 * std::sqrt(2.0);
  return {Vec3(1.0, s, 1.0).normalized(), Vec3(1.0, 1.0, 1.0).normalized(),
          Vec3(1.0, 1.0, s).normalized(), Vec3(s, 1.0, 1.0).normalized()};
}

}  // namespace

MetricParams::MetricParams(double l12, double l13, double l23) : v_(l12, l13, l23) {
  if (!in_open_octant(v_)) {
    throw std::domain_error("MetricParams: all components must be positive and finite");
  }
}

LineId::LineId(int index) : index_(index) {
  if (index < 1 || index > 4) throw std::out_of_range("LineId: index must be in 1..4");
}

RicciComponents ricci_components(const MetricParams& m) {
  const Vec3 r = ricci_unchecked(m.l12(), m.l13(), m.l23());
  return {r[0], r[1], r[2]};
}

Vec3 flow_rhs(const MetricParams& m) { return -2.0 * ricci_components(m).vector(); }

Vec3 poly_rhs(const Vec3& x) {
  const double a = x[0], b = x[1], c = x[2];
  return {6.0 * b * c + a * a - b * b - c * c,
          6.0 * a * c + b * b - a * a - c * c,
          6.0 * a * b + c * c - b * b - a * a};
}

Mat3 poly_jacobian(const Vec3& x) {
  const double a = x[0], b = x[1], c = x[2];
  Mat3 j;
  j << 2.0 * a, 6.0 * c - 2.0 * b, 6.0 * b - 2.0 * c,
       6.0 * c - 2.0 * a, 2.0 * b, 6.0 * a - 2.0 * c,
       6.0 * b - 2.0 * a, 6.0 * a - 2.0 * b, 2.0 * c;
  return j;
}

const PolyField3& poly_field() {
  static const PolyField3 field = build_poly_field();
  return field;
}

VectorField ricci_flow_field() {
  return {[](const Vec3& x) -> Vec3 {
            if (!in_open_octant(x)) return Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
            return -2.0 * ricci_unchecked(x[0], x[1], x[2]);
          },
          nullptr};
}

VectorField poly_flow_field() { return {poly_rhs, poly_jacobian}; }

double reparam_check(const MetricParams& m) {
  const Vec3 scaled = 12.0 * m.l12() * m.l13() * m.l23() * ricci_components(m).vector();
  return (poly_rhs(m.vector()) - scaled).cwiseAbs().maxCoeff();
}

const std::array<Vec3, 4>& invariant_directions() {
  static const std::array<Vec3, 4> dirs = build_directions();
  return dirs;
}

const Vec3& invariant_direction(LineId j) {
  return invariant_directions()[static_cast<std::size_t>(j.index() - 1)];
}

double tangency_defect(const Vec3& d) {
  if (!d.allFinite() || std::abs(d.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("tangency_defect: direction must be unit-norm");
  }
  const Vec3 v = poly_rhs(d);
  return (v - v.dot(d) * d).norm();
}

EinsteinFit einstein_residual(const MetricParams& m) {
  const Vec3& l = m.vector();
  const Vec3 r = ricci_components(m).vector();
  EinsteinFit fit;
  fit.c = r.dot(l) / l.dot(l);
  fit.residual = (r - fit.c * l).cwiseAbs().maxCoeff();
  return fit;
}

}  // namespace flagflow::su3
