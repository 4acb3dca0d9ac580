#include "flagflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "flagflow/parallel.hpp"

namespace flagflow::experiments {

namespace {

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 sample_stream(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  return std::mt19937_64(seq);
}

// Orthonormal pair spanning the plane perpendicular to d.
std::pair<Vec3, Vec3> normal_frame(const Vec3& d) {
  Eigen::Index k = 0;
  d.cwiseAbs().minCoeff(&k);
  Vec3 a = Vec3::Zero();
  a[k] = 1.0;
  const Vec3 e1 = d.cross(a).normalized();
  return {e1, d.cross(e1).normalized()};
}

double speed_squared(const Vec3& d) { return su3::poly_rhs(d).squaredNorm(); }

Vec3 project_to_octant_sphere(Vec3 d) {
  d = d.cwiseMax(0.0);
  return d / d.norm();
}

// Projected gradient descent of |P(d)|^2 on the closed octant of the sphere.
Vec3 polish_minimum(Vec3 d) {
  double value = speed_squared(d);
  double step = 1e-2;
  for (int it = 0; it < 500 && step > 1e-16; ++it) {
    const Vec3 p = su3::poly_rhs(d);
    Vec3 grad = 2.0 * su3::poly_jacobian(d).transpose() * p;
    grad -= grad.dot(d) * d;
    if (grad.norm() < 1e-15) break;
    const Vec3 trial = project_to_octant_sphere(d - step * grad);
    const double trial_value = speed_squared(trial);
    if (trial_value < value) {
      d = trial;
      value = trial_value;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return d;
}

}  // namespace

const compact::CompactifiedField& compactified_ricci_field() {
  static const compact::CompactifiedField field(su3::poly_field());
  return field;
}

double distance_to_line(const Vec3& x, su3::LineId j) {
  return dyn::distance_to_line(x, su3::invariant_direction(j));
}

double octant_speed(const Vec3& d) { return su3::poly_rhs(d.normalized()).norm(); }

ScanResult no_interior_equilibria_scan(int resolution) {
  if (resolution < 50) throw std::invalid_argument("no_interior_equilibria_scan: resolution must be >= 50");
  const int n = resolution;
  auto index = [n](int i, int j) { return static_cast<std::size_t>(i * (n + 1) + j); };
  std::vector<double> value(static_cast<std::size_t>((n + 1) * (n + 1)), std::numeric_limits<double>::infinity());
  auto direction = [n](int i, int j) { return Vec3(i, j, n - i - j).normalized(); };

  ScanResult out;
  out.resolution = resolution;
  out.grid_minimum = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const double v = su3::poly_rhs(direction(i, j)).norm();
      value[index(i, j)] = v;
      if (v < out.grid_minimum) {
        out.grid_minimum = v;
        out.argmin = direction(i, j);
      }
    }
  }
  out.minimum = out.grid_minimum;

  // Lattice neighbours in barycentric coordinates (i, j, n - i - j).
  static constexpr std::array<std::array<int, 2>, 6> kNeighbours{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}}};
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const double v = value[index(i, j)];
      bool local_min = true;
      for (const auto& [di, dj] : kNeighbours) {
        const int a = i + di, b = j + dj;
        if (a < 0 || b < 0 || a + b > n) continue;
        if (value[index(a, b)] < v) {
          local_min = false;
          break;
        }
      }
      if (!local_min) continue;
      const Vec3 d = polish_minimum(direction(i, j));
      const double polished = su3::poly_rhs(d).norm();
      if (polished < out.minimum) {
        out.minimum = polished;
        out.argmin = d;
      }
    }
  }
  return out;
}

void BasinConfig::validate() const {
  (void)su3::LineId{line};
  if (!(epsilon > 0.0 && epsilon <= 0.1)) throw std::invalid_argument("basin: epsilon must be in (0, 0.1]");
  if (!(delta >= 0.5) || !std::isfinite(delta)) throw std::invalid_argument("basin: delta must be >= 0.5");
  if (samples < 1) throw std::invalid_argument("basin: samples must be >= 1");
  const double inner = delta / std::sqrt(1.0 + delta * delta);
  if (!(max_ball_radius > inner && max_ball_radius < 1.0)) {
    throw std::invalid_argument("basin: max_ball_radius must lie in (pi(delta), 1)");
  }
  if (!(convergence_radius > 0.0)) throw std::invalid_argument("basin: convergence_radius must be positive");
  integrator.validate();
}

Vec3 basin_start_point(const BasinConfig& cfg, int index) {
  const Vec3& p = su3::invariant_direction(su3::LineId{cfg.line});
  const auto [e1, e2] = normal_frame(p);
  const double inner = cfg.delta / std::sqrt(1.0 + cfg.delta * cfg.delta);
  auto rng = sample_stream(cfg.seed, index);
  const double height = inner + (cfg.max_ball_radius - inner) * unit_uniform(rng);
  const double angle = 2.0 * std::numbers::pi * unit_uniform(rng);
  const double radius = cfg.epsilon * std::sqrt(unit_uniform(rng));
  return height * p + radius * (std::cos(angle) * e1 + std::sin(angle) * e2);
}

BasinReport cylinder_basin(const BasinConfig& cfg) {
  cfg.validate();
  const Vec3& p = su3::invariant_direction(su3::LineId{cfg.line});
  const auto& field = compactified_ricci_field();

  BasinReport report;
  report.line = cfg.line;
  report.epsilon = cfg.epsilon;
  report.delta = cfg.delta;
  report.samples = cfg.samples;
  report.records.resize(static_cast<std::size_t>(cfg.samples));

  parallel_for(
      report.records.size(),
      [&](std::size_t i) {
        BasinSample& rec = report.records[i];
        rec.index = static_cast<int>(i);
        rec.start = basin_start_point(cfg, rec.index);
        const auto traj = dyn::integrate_compactified(field, compact::ball_unprojection(rec.start), cfg.integrator,
                                                      cfg.compact);
        for (const auto& s : traj.samples) {
          rec.max_deviation = std::max(rec.max_deviation, dyn::ball_distance_to_line(s.state, p));
        }
        rec.end = traj.back().state;
        rec.termination = traj.termination;
        rec.converged = traj.termination == dyn::Termination::converged_to_point &&
                        (rec.end - p).norm() < cfg.convergence_radius;
      },
      cfg.threads);

  int converged = 0;
  for (const auto& rec : report.records) {
    converged += rec.converged ? 1 : 0;
    report.max_line_deviation = std::max(report.max_line_deviation, rec.max_deviation);
  }
  report.converged_fraction = static_cast<double>(converged) / static_cast<double>(cfg.samples);
  return report;
}

Vec3 line_spectrum_start(su3::LineId j, compact::ChartId chart, double radius) {
  const Vec3 x = radius * su3::invariant_direction(j);
  return compact::chart_coords(compact::SpherePoint::from_ambient(x), chart).z;
}

std::vector<LineSpectrumRow> line_spectra(const LineSpectraConfig& cfg) {
  cfg.lyapunov.validate();
  if (!(cfg.start_radius > 0.0)) throw std::invalid_argument("line_spectra: start_radius must be positive");
  for (auto c : cfg.charts) {
    if (compact::chart_axis(c) == 3 || compact::chart_sign(c) < 0) {
      throw std::invalid_argument("line_spectra: charts must be among U1, U2, U3");
    }
  }
  const auto& field = compactified_ricci_field();
  std::vector<LineSpectrumRow> rows;
  for (int line = 1; line <= 4; ++line) {
    for (auto c : cfg.charts) rows.push_back({line, c, line_spectrum_start(su3::LineId{line}, c, cfg.start_radius), {}});
  }
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto& chart_poly = field.chart(rows[i].chart);
    const VectorField chart_flow{[&chart_poly](const Vec3& z) { return chart_poly(z); },
                                 [&chart_poly](const Vec3& z) { return chart_poly.jacobian(z); }};
    rows[i].spectrum = dyn::lyapunov_spectrum(chart_flow, rows[i].start, cfg.lyapunov);
  });
  return rows;
}

std::string_view to_string(LimitKind k) {
  switch (k) {
    case LimitKind::normal_einstein: return "normal_einstein";
    case LimitKind::einstein: return "einstein";
    case LimitKind::non_einstein: return "non_einstein";
  }
  return "?";
}

double direction_einstein_residual(const Vec3& d) {
  if (!d.allFinite() || !(d.array() > 0.0).all()) return std::numeric_limits<double>::infinity();
  return su3::einstein_residual(su3::MetricParams(d.normalized())).residual;
}

LimitClassification classify_limit(const su3::MetricParams& x0, const LimitConfig& cfg) {
  const auto traj = dyn::integrate_compactified(compactified_ricci_field(), x0.vector(), cfg.integrator, cfg.compact);
  LimitClassification out;
  out.termination = traj.termination;
  out.end_ball = traj.back().state;
  out.limit_direction = out.end_ball.normalized();
  out.einstein_residual_at_limit = direction_einstein_residual(out.limit_direction);
  if (traj.termination != dyn::Termination::converged_to_point) {
    out.kind = LimitKind::non_einstein;
  } else if ((out.limit_direction - Vec3::Ones().normalized()).norm() < cfg.diagonal_tol) {
    out.kind = LimitKind::normal_einstein;
  } else if (out.einstein_residual_at_limit < cfg.einstein_tol) {
    out.kind = LimitKind::einstein;
  } else {
    out.kind = LimitKind::non_einstein;
  }
  return out;
}

}  // namespace flagflow::experiments
