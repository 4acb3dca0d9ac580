#include "flagflow/compactify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "flagflow/parallel.hpp"

namespace flagflow::compact {

namespace {

constexpr double kChartDomainTol = 1e-12;

// The two ambient axes that survive in an infinity chart, in increasing order.
std::array<int, 2> other_axes(int k) {
  switch (k) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

std::size_t chart_slot(ChartId c) { return static_cast<std::size_t>(c); }

// z3^d * P(x(z)) as a polynomial in z.
Polynomial3 homogenize(const Polynomial3& p, int axis, int d) {
  const auto [j, l] = other_axes(axis);
  std::vector<Monomial> out;
  out.reserve(p.terms().size());
  for (const auto& t : p.terms()) {
    const auto& e = t.exp;
    out.push_back({t.coef,
                   {e[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(l)], d - t.degree()}});
  }
  return Polynomial3(std::move(out));
}

bool newton_equator(const PolyField3& g, Eigen::Vector2d& z, const EquilibriumSearchConfig& cfg, int degree) {
  auto residual = [&](const Eigen::Vector2d& w) {
    const Vec3 v = g(Vec3(w[0], w[1], 0.0));
    return Eigen::Vector2d(v[0], v[1]);
  };
  auto tolerance = [&](const Eigen::Vector2d& w) {
    return cfg.newton_tol * std::pow(1.0 + w.squaredNorm(), 0.5 * (degree + 1));
  };
  int polished = 0;
  for (int it = 0; it < cfg.max_newton_iter; ++it) {
    const Eigen::Vector2d r = residual(z);
    if (!r.allFinite()) return false;
    if (r.norm() < tolerance(z)) {
      // A couple of extra iterations settle the root to working precision.
      if (++polished > 2) return true;
    }
    const Mat3 jac = g.jacobian(Vec3(z[0], z[1], 0.0));
    const Eigen::Matrix2d j2 = jac.topLeftCorner<2, 2>();
    const double det = j2.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return false;
    const Eigen::Vector2d step = j2.inverse() * r;
    z -= step;
    if (!z.allFinite() || z.norm() > 1e8) return false;
    if (step.norm() == 0.0 && r.norm() < tolerance(z)) return true;
  }
  return residual(z).norm() < tolerance(z);
}

Vec3 equator_direction(ChartId c, const Eigen::Vector2d& root) {
  const int k = chart_axis(c);
  const auto [j, l] = other_axes(k);
  Vec3 d;
  d[k] = 1.0;
  d[j] = root[0];
  d[l] = root[1];
  return chart_sign(c) * d.normalized();
}

}  // namespace

int chart_axis(ChartId c) {
  switch (c) {
    case ChartId::U1:
    case ChartId::V1: return 0;
    case ChartId::U2:
    case ChartId::V2: return 1;
    case ChartId::U3:
    case ChartId::V3: return 2;
    case ChartId::Ambient: return 3;
  }
  return 3;
}

int chart_sign(ChartId c) {
  return (c == ChartId::V1 || c == ChartId::V2 || c == ChartId::V3) ? -1 : 1;
}

std::string_view to_string(ChartId c) {
  switch (c) {
    case ChartId::U1: return "U1";
    case ChartId::U2: return "U2";
    case ChartId::U3: return "U3";
    case ChartId::V1: return "V1";
    case ChartId::V2: return "V2";
    case ChartId::V3: return "V3";
    case ChartId::Ambient: return "R3";
  }
  return "?";
}

std::optional<ChartId> parse_chart(std::string_view name) {
  for (ChartId c : kAllCharts) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

SpherePoint::SpherePoint(const Vec4& y) : y_(y) {
  if (!y.allFinite() || std::abs(y.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("SpherePoint: |y| must be 1");
  }
}

SpherePoint SpherePoint::from_ambient(const Vec3& x) {
  Vec4 y;
  y << x, 1.0;
  return SpherePoint(y / std::sqrt(1.0 + x.squaredNorm()));
}

SpherePoint SpherePoint::at_infinity(const Vec3& d) {
  if (!d.allFinite() || d.norm() == 0.0) throw std::invalid_argument("SpherePoint::at_infinity: zero direction");
  Vec4 y;
  y << d.normalized(), 0.0;
  return SpherePoint(y);
}

Vec3 ball_projection(const Vec3& x) { return x / std::sqrt(1.0 + x.squaredNorm()); }

Vec3 ball_unprojection(const Vec3& u) {
  const double n2 = u.squaredNorm();
  if (!u.allFinite() || std::sqrt(n2) >= 1.0 - 1e-12) {
    throw std::domain_error("ball_unprojection: point must lie inside the open unit ball");
  }
  return u / std::sqrt(1.0 - n2);
}

Vec3 ball_from_sphere(const SpherePoint& p) {
  if (p.y()[3] < 0.0) throw std::domain_error("ball_from_sphere: point in the south hemisphere");
  return p.y().head<3>();
}

ChartPoint chart_coords(const SpherePoint& p, ChartId c) {
  const Vec4& y = p.y();
  const int k = chart_axis(c);
  const double divider = y[k] * chart_sign(c);
  if (divider <= kChartDomainTol) {
    throw std::domain_error("chart_coords: point outside the chart domain");
  }
  ChartPoint out{c, Vec3::Zero()};
  if (c == ChartId::Ambient) {
    out.z = y.head<3>() / y[3];
    return out;
  }
  const auto [j, l] = other_axes(k);
  out.z = Vec3(y[j], y[l], y[3]) / y[k];
  return out;
}

SpherePoint chart_point_to_sphere(const ChartPoint& p) {
  if (p.chart == ChartId::Ambient) return SpherePoint::from_ambient(p.z);
  const int k = chart_axis(p.chart);
  const auto [j, l] = other_axes(k);
  const double scale = chart_sign(p.chart) / std::sqrt(1.0 + p.z.squaredNorm());
  Vec4 y;
  y[k] = scale;
  y[j] = scale * p.z[0];
  y[l] = scale * p.z[1];
  y[3] = scale * p.z[2];
  // Renormalize to absorb the rounding in scale.
  return SpherePoint(y / y.norm());
}

ChartId best_chart(const SpherePoint& p) {
  const Vec4& y = p.y();
  int best = -1;
  double best_mag = -1.0;
  for (int i = 0; i < 4; ++i) {
    if (i == 3 && y[3] <= 0.0) continue;
    if (std::abs(y[i]) > best_mag) {
      best_mag = std::abs(y[i]);
      best = i;
    }
  }
  if (best == 3) return ChartId::Ambient;
  static constexpr std::array<ChartId, 3> pos{ChartId::U1, ChartId::U2, ChartId::U3};
  static constexpr std::array<ChartId, 3> neg{ChartId::V1, ChartId::V2, ChartId::V3};
  const auto idx = static_cast<std::size_t>(best);
  return y[best] >= 0.0 ? pos[idx] : neg[idx];
}

PolyField3 chart_field(const PolyField3& f, ChartId c) {
  if (c == ChartId::Ambient) return f;
  const int d = f.degree();
  const int k = chart_axis(c);
  const auto [j, l] = other_axes(k);
  std::array<Polynomial3, 3> q;
  for (int i = 0; i < 3; ++i) q[static_cast<std::size_t>(i)] = homogenize(f.component(i), k, d);
  const auto& qk = q[static_cast<std::size_t>(k)];
  const auto z1 = Polynomial3::variable(0);
  const auto z2 = Polynomial3::variable(1);
  const auto z3 = Polynomial3::variable(2);
  // Orientation factor sign(z3)^(d-1) keeps time running forward in the
  // north hemisphere, where sign(z3) equals the chart sign.
  const double orient = (chart_sign(c) < 0 && (d - 1) % 2 != 0) ? -1.0 : 1.0;
  return PolyField3({orient * (q[static_cast<std::size_t>(j)] - z1 * qk),
                     orient * (q[static_cast<std::size_t>(l)] - z2 * qk),
                     orient * (-1.0 * (z3 * qk))});
}

CompactifiedField::CompactifiedField(PolyField3 f) {
  for (ChartId c : kAllCharts) charts_[chart_slot(c)] = chart_field(f, c);
}

const PolyField3& CompactifiedField::chart(ChartId c) const { return charts_[chart_slot(c)]; }

Vec3 compactified_field(const PolyField3& f, const ChartPoint& p) { return chart_field(f, p.chart)(p.z); }

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::attractor: return "attractor";
    case Stability::repeller: return "repeller";
    case Stability::saddle: return "saddle";
    case Stability::nonhyperbolic: return "nonhyperbolic";
  }
  return "?";
}

Stability classify_eigenvalues(const std::array<std::complex<double>, 3>& ev, double tol) {
  int negative = 0;
  int positive = 0;
  for (const auto& e : ev) {
    if (std::abs(e.real()) <= tol) return Stability::nonhyperbolic;
    (e.real() < 0.0 ? negative : positive) += 1;
  }
  if (positive == 0) return Stability::attractor;
  if (negative == 0) return Stability::repeller;
  return Stability::saddle;
}

void EquilibriumSearchConfig::validate() const {
  if (grid < 32) throw std::invalid_argument("equilibrium search: grid must be >= 32");
  if (!(box > 0.0)) throw std::invalid_argument("equilibrium search: box must be positive");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("equilibrium search: newton_tol must be positive");
  if (max_newton_iter < 1) throw std::invalid_argument("equilibrium search: max_newton_iter must be >= 1");
  if (!(dedupe_radius > 0.0)) throw std::invalid_argument("equilibrium search: dedupe_radius must be positive");
  if (!(hyperbolic_tol >= 0.0)) throw std::invalid_argument("equilibrium search: hyperbolic_tol must be >= 0");
}

std::vector<Eigen::Vector2d> find_chart_roots(const CompactifiedField& f, ChartId c,
                                              const EquilibriumSearchConfig& cfg) {
  cfg.validate();
  if (chart_axis(c) == 3) throw std::invalid_argument("find_chart_roots: needs an infinity chart");
  const PolyField3& g = f.chart(c);
  const auto n = static_cast<std::size_t>(cfg.grid);
  std::vector<std::optional<Eigen::Vector2d>> found(n * n);
  parallel_for(
      n * n,
      [&](std::size_t idx) {
        const double step = 2.0 * cfg.box / static_cast<double>(n - 1);
        Eigen::Vector2d z(-cfg.box + step * static_cast<double>(idx % n),
                          -cfg.box + step * static_cast<double>(idx / n));
        if (newton_equator(g, z, cfg, f.degree())) found[idx] = z;
      },
      cfg.threads);

  std::vector<Eigen::Vector2d> roots;
  for (const auto& r : found) {
    if (!r) continue;
    const bool dup = std::any_of(roots.begin(), roots.end(),
                                 [&](const Eigen::Vector2d& q) { return (q - *r).norm() < cfg.dedupe_radius; });
    if (!dup) roots.push_back(*r);
  }
  std::sort(roots.begin(), roots.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
  });
  return roots;
}

InfinityEquilibrium classify_equilibrium(const CompactifiedField& f, ChartId c, const Eigen::Vector2d& root,
                                         double hyperbolic_tol) {
  InfinityEquilibrium e;
  e.chart = c;
  e.z = Vec3(root[0], root[1], 0.0);
  e.direction = equator_direction(c, root);
  const Eigen::EigenSolver<Mat3> solver(f.jacobian({c, e.z}), false);
  const Eigen::Vector3cd ev = solver.eigenvalues();
  for (int i = 0; i < 3; ++i) e.eigenvalues[static_cast<std::size_t>(i)] = ev[i];
  std::sort(e.eigenvalues.begin(), e.eigenvalues.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  e.stability = classify_eigenvalues(e.eigenvalues, hyperbolic_tol);
  e.first_octant = (e.direction.array() > 1e-12).all();
  return e;
}

std::vector<InfinityEquilibrium> find_infinity_equilibria(const CompactifiedField& f,
                                                          const EquilibriumSearchConfig& cfg) {
  std::vector<Vec3> directions;
  for (ChartId c : kInfinityCharts) {
    for (const auto& root : find_chart_roots(f, c, cfg)) {
      const Vec3 d = equator_direction(c, root);
      const bool dup = std::any_of(directions.begin(), directions.end(),
                                   [&](const Vec3& q) { return (q - d).norm() < cfg.dedupe_radius; });
      if (!dup) directions.push_back(d);
    }
  }

  std::vector<InfinityEquilibrium> out;
  out.reserve(directions.size());
  for (const Vec3& d : directions) {
    // Classify in the U chart with the largest (positive) dividing coordinate.
    Eigen::Index k = 0;
    d.maxCoeff(&k);
    const ChartId c = kInfinityCharts[static_cast<std::size_t>(k)];
    Eigen::Vector2d root = chart_coords(SpherePoint::at_infinity(d), c).z.head<2>();
    newton_equator(f.chart(c), root, cfg, f.degree());
    out.push_back(classify_equilibrium(f, c, root, cfg.hyperbolic_tol));
  }
  std::sort(out.begin(), out.end(), [](const InfinityEquilibrium& a, const InfinityEquilibrium& b) {
    const auto ka = std::tuple(static_cast<int>(a.chart), a.z[0], a.z[1]);
    const auto kb = std::tuple(static_cast<int>(b.chart), b.z[0], b.z[1]);
    return ka < kb;
  });
  return out;
}

}  // namespace flagflow::compact
