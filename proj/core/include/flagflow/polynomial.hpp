#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace flagflow {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Exponent triple of a monomial x1^a * x2^b * x3^c.
using Exponents = std::array<int, 3>;

struct Monomial {
  double coef = 0.0;
  Exponents exp{0, 0, 0};

  int degree() const { return exp[0] + exp[1] + exp[2]; }
};

/// Sparse real polynomial in three variables.
///
/// Terms are kept merged (one entry per exponent triple) and sorted by
/// exponent, so two polynomials with the same coefficients compare equal
/// term-by-term and evaluation order is deterministic.
class Polynomial3 {
public:
  Polynomial3() = default;
  explicit Polynomial3(std::vector<Monomial> terms);

  static Polynomial3 constant(double c);
  /// The coordinate function x_{index+1}.
  static Polynomial3 variable(int index);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;

  double operator()(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Polynomial3 derivative(int index) const;

  Polynomial3& operator+=(const Polynomial3& other);
  Polynomial3& operator-=(const Polynomial3& other);
  Polynomial3& operator*=(double s);

  friend Polynomial3 operator+(Polynomial3 a, const Polynomial3& b) { return a += b; }
  friend Polynomial3 operator-(Polynomial3 a, const Polynomial3& b) { return a -= b; }
  friend Polynomial3 operator*(Polynomial3 a, double s) { return a *= s; }
  friend Polynomial3 operator*(double s, Polynomial3 a) { return a *= s; }
  friend Polynomial3 operator*(const Polynomial3& a, const Polynomial3& b);

private:
  void normalize();

  std::vector<Monomial> terms_;
};

/// Polynomial vector field X = (P1, P2, P3) on R^3.
class PolyField3 {
public:
  PolyField3() = default;
  explicit PolyField3(std::array<Polynomial3, 3> components);

  const Polynomial3& component(int i) const { return components_[static_cast<std::size_t>(i)]; }
  const std::array<Polynomial3, 3>& components() const { return components_; }

  /// d = max deg(P_i).
  int degree() const { return degree_; }

  Vec3 operator()(const Vec3& x) const;
  Mat3 jacobian(const Vec3& x) const;

private:
  std::array<Polynomial3, 3> components_;
  std::array<std::array<Polynomial3, 3>, 3> partials_;
  int degree_ = 0;
};

}  // namespace flagflow
