#include <doctest.h>

#include <cmath>
#include <numbers>

#include <flagflow/experiments.hpp>
#include <flagflow/serialize.hpp>

using namespace flagflow;
using namespace flagflow::experiments;

TEST_CASE("octant speed spot values") {
  CHECK(std::abs(octant_speed(Vec3(1, 1, 1)) - 5.0 / std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(octant_speed(Vec3(1, 0, 0)) - std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(octant_speed(Vec3(0, 0, 7)) - std::sqrt(3.0)) < 1e-12);
}

TEST_CASE("no interior equilibria: positive, stable minimum") {
  const auto a = no_interior_equilibria_scan(400);
  const auto b = no_interior_equilibria_scan(800);
  // Reference from tests/oracles/scan_oracle.py (angle grid + L-BFGS-B).
  CHECK(a.minimum == doctest::Approx(1.0498859489363266).epsilon(1e-9));
  CHECK(a.minimum > 0.0);
  CHECK(std::abs(a.minimum - b.minimum) < 0.05 * a.minimum);
  CHECK(a.minimum <= a.grid_minimum);
  CHECK(std::abs(a.argmin.norm() - 1.0) < 1e-12);
  CHECK(a.argmin[2] == doctest::Approx(0.9760656).epsilon(1e-6));
  CHECK_THROWS_AS(no_interior_equilibria_scan(49), std::invalid_argument);
}

TEST_CASE("basin configuration is validated") {
  BasinConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epsilon = 0.2;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.delta = 0.4;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.samples = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.line = 5;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("basin start points fill the cylinder") {
  BasinConfig cfg;
  cfg.line = 3;
  const Vec3 p = su3::invariant_direction(su3::LineId{3});
  const double inner = 0.6 / std::sqrt(1.36);
  for (int i = 0; i < 500; ++i) {
    const Vec3 u = basin_start_point(cfg, i);
    CHECK(dyn::ball_distance_to_line(u, p) <= cfg.epsilon + 1e-15);
    CHECK(u.dot(p) >= inner);
    CHECK(u.dot(p) <= cfg.max_ball_radius);
    CHECK(u.norm() < 1.0);
  }
  CHECK((basin_start_point(cfg, 7) - basin_start_point(cfg, 7)).norm() == 0.0);
  BasinConfig other = cfg;
  other.seed = 8;
  CHECK((basin_start_point(cfg, 7) - basin_start_point(other, 7)).norm() > 0.0);
}

TEST_CASE("basin of the normal metric") {
  BasinConfig cfg;
  cfg.samples = 24;
  const auto r = cylinder_basin(cfg);
  CHECK(r.converged_fraction == 1.0);
  CHECK(r.max_line_deviation < cfg.epsilon);
  for (const auto& rec : r.records) {
    CHECK(rec.termination == dyn::Termination::converged_to_point);
    // Limits are Einstein metrics.
    CHECK(direction_einstein_residual(rec.end) < 1e-6);
  }
}

TEST_CASE("basin reports are deterministic and thread independent") {
  BasinConfig cfg;
  cfg.line = 1;
  cfg.samples = 12;
  cfg.threads = 1;
  const auto a = io::basin_json(cylinder_basin(cfg));
  cfg.threads = 4;
  const auto b = io::basin_json(cylinder_basin(cfg));
  CHECK(a == b);
}

TEST_CASE("saddle lines behave alike under permutation") {
  BasinConfig cfg;
  cfg.samples = 12;
  double fraction[5] = {};
  for (int j : {1, 3, 4}) {
    cfg.line = j;
    const auto r = cylinder_basin(cfg);
    fraction[j] = r.converged_fraction;
    for (const auto& rec : r.records) {
      if (rec.converged) CHECK(direction_einstein_residual(rec.end) < 1e-6);
    }
  }
  CHECK(fraction[1] == fraction[3]);
  CHECK(fraction[3] == fraction[4]);
}

TEST_CASE("lyapunov spectra at the singularities equal the chart eigenvalues") {
  // Exact U1 eigenvalues from tests/oracles/model_oracle.py; the base point
  // converges to p_j, so the exponents are the real parts there.
  const double r2 = std::numbers::sqrt2;
  const double s = std::sqrt(2 * (9 + 4 * r2));
  const std::array<std::array<double, 3>, 4> exact{{{16 + 4 * r2, -4 * r2, -8 - 16 * r2},
                                                    {-5, -7, -7},
                                                    {16 + 4 * r2, -4 * r2, -8 - 16 * r2},
                                                    {-8 + 5 * r2 + s, -4 + 2 * r2, -8 + 5 * r2 - s}}};
  const auto rows = line_spectra();
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.chart == compact::ChartId::U1);
    CHECK(row.spectrum.converged);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(row.spectrum.exponents[i] - exact[row.line - 1][i]) < 1e-6);
    }
  }
}

TEST_CASE("table start points are chart images of radius-2 points") {
  const Vec3 z = line_spectrum_start(su3::LineId{2}, compact::ChartId::U1, 2.0);
  CHECK((z - Vec3(1, 1, std::sqrt(3.0) / 2.0)).norm() < 1e-15);
  LineSpectraConfig bad;
  bad.charts = {compact::ChartId::V1};
  CHECK_THROWS_AS(line_spectra(bad), std::invalid_argument);
}

TEST_CASE("limit classification") {
  const auto near_normal = classify_limit(su3::MetricParams(1.2, 1.25, 1.2));
  CHECK(near_normal.kind == LimitKind::normal_einstein);
  CHECK(near_normal.termination == dyn::Termination::converged_to_point);

  const auto diag = classify_limit(su3::MetricParams(0.7, 0.7, 0.7));
  CHECK(diag.kind == LimitKind::normal_einstein);
  CHECK((diag.limit_direction - Vec3::Ones().normalized()).norm() < 1e-9);

  // The saddle p_1 cannot be a computed limit; even the exact ray start is
  // pushed off by rounding (see the integrator tests).
  const Vec3 p1 = su3::invariant_direction(su3::LineId{1});
  CHECK(classify_limit(su3::MetricParams(2.0 * p1)).kind == LimitKind::normal_einstein);
  // The Einstein kind itself: a limit direction on a saddle ray with zero residual.
  CHECK(direction_einstein_residual(p1) < 1e-8);
  CHECK((p1 - Vec3::Ones().normalized()).norm() > 1e-6);

  // A 0.01 perturbation off gamma_1 escapes along the unstable direction of the
  // saddle p_1 and ends at the normal metric (cross-checked by tests/oracles/flow_oracle.py).
  const auto perturbed = classify_limit(su3::MetricParams(2.0 * p1 + 0.01 * Vec3(1, 0, -1).normalized()));
  CHECK(perturbed.kind == LimitKind::normal_einstein);

  CHECK(std::isinf(direction_einstein_residual(Vec3(1, -1, 1))));
}
