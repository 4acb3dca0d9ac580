#include "flagflow/vector_field.hpp"

#include <memory>

namespace flagflow {

Mat3 VectorField::jacobian_at(const Vec3& x, double h) const {
  if (jacobian) return jacobian(x);
  Mat3 j;
  for (int c = 0; c < 3; ++c) {
    Vec3 e = Vec3::Zero();
    e[c] = h;
    j.col(c) = (rhs(x + e) - rhs(x - e)) / (2.0 * h);
  }
  return j;
}

VectorField VectorField::from_poly(PolyField3 field) {
  auto shared = std::make_shared<const PolyField3>(std::move(field));
  return {[shared](const Vec3& x) { return (*shared)(x); },
          [shared](const Vec3& x) { return shared->jacobian(x); }};
}

VectorField VectorField::linear(const Mat3& a) {
  return {[a](const Vec3& x) -> Vec3 { return a * x; }, [a](const Vec3&) { return a; }};
}

}  // namespace flagflow
