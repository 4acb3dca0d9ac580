#pragma once

// Poincare compactification of polynomial vector fields on R^3.
//
// R^3 is identified with the north hemisphere of S^3 via the central
// projection x -> (x, 1) / sqrt(1 + |x|^2); the equator y4 = 0 represents
// the directions at infinity. Infinity charts U_k (V_k) cover the open
// hemisphere y_k > 0 (y_k < 0) with coordinates
//   z = (y_j / y_k, y_l / y_k, y4 / y_k),  {j < l} = {1,2,3} \ {k},
// so the equator is z3 = 0. The ambient chart is the original R^3.
//
// Chart fields are returned with the positive factor 1 / Delta(z)^(d-1)
// dropped, which leaves a polynomial field with the same orbits and
// orientation in the north hemisphere.

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "flagflow/polynomial.hpp"

namespace flagflow::compact {

enum class ChartId { U1, U2, U3, V1, V2, V3, Ambient };

inline constexpr std::array<ChartId, 3> kInfinityCharts{ChartId::U1, ChartId::U2, ChartId::U3};
inline constexpr std::array<ChartId, 7> kAllCharts{ChartId::U1, ChartId::U2, ChartId::U3, ChartId::V1,
                                                   ChartId::V2, ChartId::V3, ChartId::Ambient};

/// Index of the sphere coordinate the chart divides by (0..2, or 3 for Ambient).
int chart_axis(ChartId c);
/// +1 for U charts and Ambient, -1 for V charts.
int chart_sign(ChartId c);
std::string_view to_string(ChartId c);
std::optional<ChartId> parse_chart(std::string_view name);

using Vec4 = Eigen::Vector4d;

/// Point of S^3 in R^4.
class SpherePoint {
public:
  /// Throws std::invalid_argument unless |y| = 1 within 1e-12.
  explicit SpherePoint(const Vec4& y);
  /// Central projection f_+ of an ambient point to the north hemisphere.
  static SpherePoint from_ambient(const Vec3& x);
  /// Equator point in direction d (normalized internally; d != 0).
  static SpherePoint at_infinity(const Vec3& d);

  const Vec4& y() const { return y_; }
  bool on_equator() const { return y_[3] == 0.0; }

private:
  Vec4 y_;
};

struct ChartPoint {
  ChartId chart = ChartId::U1;
  Vec3 z = Vec3::Zero();
};

/// pi(x) = x / sqrt(1 + |x|^2).
Vec3 ball_projection(const Vec3& x);
/// Inverse of pi; throws std::domain_error unless |u| < 1 - 1e-12.
Vec3 ball_unprojection(const Vec3& u);
/// (y1, y2, y3) for a point of the closed north hemisphere.
Vec3 ball_from_sphere(const SpherePoint& p);

/// Throws std::domain_error if the chart's dividing coordinate does not have
/// the chart's sign with magnitude > 1e-12.
ChartPoint chart_coords(const SpherePoint& p, ChartId c);
SpherePoint chart_point_to_sphere(const ChartPoint& p);

/// Chart whose dividing coordinate has the largest magnitude (ties resolved
/// toward the lower axis, infinity charts before Ambient).
ChartId best_chart(const SpherePoint& p);

/// Polynomial expression of the compactified field in chart c.
PolyField3 chart_field(const PolyField3& f, ChartId c);

/// A polynomial field together with its seven chart expressions.
class CompactifiedField {
public:
  explicit CompactifiedField(PolyField3 f);

  const PolyField3& ambient() const { return charts_[6]; }
  const PolyField3& chart(ChartId c) const;
  int degree() const { return ambient().degree(); }

  Vec3 operator()(const ChartPoint& p) const { return chart(p.chart)(p.z); }
  Mat3 jacobian(const ChartPoint& p) const { return chart(p.chart).jacobian(p.z); }

private:
  std::array<PolyField3, 7> charts_;
};

Vec3 compactified_field(const PolyField3& f, const ChartPoint& p);

enum class Stability { attractor, repeller, saddle, nonhyperbolic };
std::string_view to_string(Stability s);

/// Stability by eigenvalue real parts: any |Re| <= tol is nonhyperbolic.
Stability classify_eigenvalues(const std::array<std::complex<double>, 3>& ev, double tol);

struct InfinityEquilibrium {
  ChartId chart = ChartId::U1;  ///< chart in which it was classified
  Vec3 z = Vec3::Zero();        ///< (z1, z2, 0)
  Vec3 direction = Vec3::Zero();
  std::array<std::complex<double>, 3> eigenvalues{};
  Stability stability = Stability::nonhyperbolic;
  bool first_octant = false;
};

struct EquilibriumSearchConfig {
  int grid = 64;               ///< seeds per axis per chart
  double box = 8.0;            ///< seeds cover [-box, box]^2
  double newton_tol = 1e-12;
  int max_newton_iter = 60;
  double dedupe_radius = 1e-6;
  double hyperbolic_tol = 1e-9;
  unsigned threads = 0;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

/// Distinct real roots (z1, z2) of the equator system of one infinity chart.
std::vector<Eigen::Vector2d> find_chart_roots(const CompactifiedField& f, ChartId c,
                                              const EquilibriumSearchConfig& cfg = {});

/// Distinct equator equilibria visible in U1, U2, U3. Points are merged
/// across charts by their position on the sphere; antipodal points are
/// kept apart since their stability types differ when d is even.
std::vector<InfinityEquilibrium> find_infinity_equilibria(const CompactifiedField& f,
                                                          const EquilibriumSearchConfig& cfg = {});

/// Eigen-analysis of the chart field at the equator root (z1, z2, 0).
InfinityEquilibrium classify_equilibrium(const CompactifiedField& f, ChartId c, const Eigen::Vector2d& root,
                                         double hyperbolic_tol = 1e-9);

}  // namespace flagflow::compact
