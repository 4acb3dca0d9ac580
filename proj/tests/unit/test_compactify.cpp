#include <doctest.h>

#include <algorithm>
#include <random>

#include <flagflow/compactify.hpp>
#include <flagflow/experiments.hpp>
#include <flagflow/su3flag.hpp>

using namespace flagflow;
using namespace flagflow::compact;

namespace {

const CompactifiedField& field() { return experiments::compactified_ricci_field(); }

// Brute-force pushforward of the ambient field into chart c: dz/dt = Dphi(x) X(x)
// by central differences of the chart map, at x = the ambient point of z.
Vec3 pushforward(ChartId c, const Vec3& z) {
  const SpherePoint s = chart_point_to_sphere({c, z});
  const Vec3 x = s.y().head<3>() / s.y()[3];
  const Vec3 v = su3::poly_rhs(x);
  const double h = 1e-6 * (1.0 + x.norm()) / (1.0 + v.norm());
  auto phi = [c](const Vec3& p) { return chart_coords(SpherePoint::from_ambient(p), c).z; };
  return (phi(x + h * v) - phi(x - h * v)) / (2.0 * h);
}

}  // namespace

TEST_CASE("chart bookkeeping") {
  CHECK(chart_axis(ChartId::U2) == 1);
  CHECK(chart_sign(ChartId::V3) == -1);
  CHECK(chart_axis(ChartId::Ambient) == 3);
  for (auto c : kAllCharts) CHECK(parse_chart(to_string(c)) == c);
  CHECK_FALSE(parse_chart("U4").has_value());
}

TEST_CASE("ball projection round trip and domain") {
  const Vec3 x(3.0, -0.5, 12.0);
  const Vec3 u = ball_projection(x);
  CHECK(u.norm() < 1.0);
  CHECK((ball_unprojection(u) - x).norm() < 1e-12);
  CHECK_THROWS_AS(ball_unprojection(Vec3(1, 0, 0)), std::domain_error);
  CHECK((ball_from_sphere(SpherePoint::from_ambient(x)) - u).norm() < 1e-15);
  CHECK_THROWS_AS(SpherePoint(Vec4(1, 1, 0, 0)), std::invalid_argument);
}

TEST_CASE("chart coordinates round trip and reject the wrong hemisphere") {
  const SpherePoint p = SpherePoint::from_ambient(Vec3(2.0, 0.5, -1.0));
  for (auto c : kAllCharts) {
    if (c == ChartId::V1 || c == ChartId::U3 || c == ChartId::V2) {
      // y1 > 0, y2 > 0, y3 < 0 here.
      CHECK_THROWS_AS(chart_coords(p, c), std::domain_error);
      continue;
    }
    const auto z = chart_coords(p, c);
    CHECK((chart_point_to_sphere(z).y() - p.y()).norm() < 1e-14);
  }
  CHECK(best_chart(p) == ChartId::U1);
  CHECK_THROWS_AS(chart_coords(SpherePoint::at_infinity(Vec3(1, 0, 0)), ChartId::Ambient), std::domain_error);
}

TEST_CASE("U1 field at the chart origin") {
  // P(1,0,0) = (1,-1,-1): (-z1 P1 + P2, -z2 P1 + P3, -z3 P1) = (-1,-1,0).
  CHECK((compactified_field(su3::poly_field(), {ChartId::U1, Vec3::Zero()}) - Vec3(-1, -1, 0)).norm() == 0.0);
}

TEST_CASE("chart fields equal z3^(d-1) times the pushforward") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.2, 1.5);
  for (auto c : kInfinityCharts) {
    for (int i = 0; i < 50; ++i) {
      const Vec3 z(u(rng), u(rng), w(rng));
      const Vec3 expected = z[2] * pushforward(c, z);  // d - 1 = 1
      CHECK((field().chart(c)(z) - expected).norm() < 1e-6 * (1.0 + expected.norm()));
    }
  }
  for (auto c : {ChartId::V1, ChartId::V2, ChartId::V3}) {
    for (int i = 0; i < 50; ++i) {
      const Vec3 z(u(rng), u(rng), -w(rng));  // north hemisphere: y4 > 0, y_k < 0
      const Vec3 push = pushforward(c, z);
      const Vec3 f = field().chart(c)(z);
      // Same orbits and orientation: a positive multiple of the pushforward.
      CHECK(f.cross(push).norm() < 1e-6 * (1.0 + f.norm() * push.norm()));
      CHECK(f.dot(push) > 0.0);
    }
  }
  const Vec3 x(0.4, -1.3, 2.2);
  CHECK((field().ambient()(x) - su3::poly_rhs(x)).norm() < 1e-14);
}

TEST_CASE("equator is invariant in every infinity chart") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (auto c : kAllCharts) {
    if (c == ChartId::Ambient) continue;
    for (int i = 0; i < 1000; ++i) CHECK(field().chart(c)(Vec3(u(rng), u(rng), 0.0))[2] == 0.0);
  }
}

TEST_CASE("overlapping charts describe the same oriented direction field") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  auto sphere_velocity = [](const SpherePoint& p, ChartId c) {
    const auto z = chart_coords(p, c).z;
    const Vec3 f = field().chart(c)(z);
    const double h = 1e-7 / (1.0 + f.norm());
    return Vec4((chart_point_to_sphere({c, z + h * f}).y() - chart_point_to_sphere({c, z - h * f}).y()) / (2 * h));
  };
  for (int i = 0; i < 100; ++i) {
    const SpherePoint p(Vec4(u(rng), u(rng), -u(rng), 0.3 * u(rng)).normalized());
    const Vec4 a = sphere_velocity(p, ChartId::U1);
    const Vec4 b = sphere_velocity(p, ChartId::V3);
    const Vec4 amb = sphere_velocity(p, ChartId::Ambient);
    CHECK(a.dot(b) / (a.norm() * b.norm()) > 1.0 - 1e-8);
    CHECK(a.dot(amb) / (a.norm() * amb.norm()) > 1.0 - 1e-8);
  }
}

TEST_CASE("stability classification from eigenvalues") {
  using C = std::complex<double>;
  CHECK(classify_eigenvalues({C(-1), C(-2), C(-3, 1)}, 1e-9) == Stability::attractor);
  CHECK(classify_eigenvalues({C(1), C(2), C(3)}, 1e-9) == Stability::repeller);
  CHECK(classify_eigenvalues({C(1), C(-2), C(3)}, 1e-9) == Stability::saddle);
  CHECK(classify_eigenvalues({C(1e-12), C(-2), C(3)}, 1e-9) == Stability::nonhyperbolic);
}

TEST_CASE("seven real equator roots per chart") {
  for (auto c : kInfinityCharts) CHECK(find_chart_roots(field(), c).size() == 7);
  EquilibriumSearchConfig bad;
  bad.grid = 4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("census of singularities at infinity") {
  const auto eqs = find_infinity_equilibria(field());
  REQUIRE(eqs.size() == 10);
  int octant = 0;
  for (const auto& e : eqs) {
    CHECK(std::abs(e.direction.norm() - 1.0) < 1e-12);
    CHECK(e.z[2] == 0.0);
    CHECK((field().chart(e.chart)(e.z)).norm() < 1e-10);
    if (!e.first_octant) continue;
    ++octant;
    double best = 1.0;
    int line = 0;
    for (int j = 1; j <= 4; ++j) {
      const double d = (e.direction - su3::invariant_direction(su3::LineId{j})).cwiseAbs().maxCoeff();
      if (d < best) best = d, line = j;
    }
    CHECK(best < 1e-10);
    CHECK(e.stability == (line == 2 ? Stability::attractor : Stability::saddle));
    for (const auto& l : e.eigenvalues) CHECK(std::abs(l.real()) > 1e-6);
  }
  CHECK(octant == 4);
  // Antipodal pairs are distinct points with different types.
  const auto repellers = std::count_if(eqs.begin(), eqs.end(), [](const auto& e) {
    return e.stability == Stability::repeller;
  });
  CHECK(repellers == 3);
}

TEST_CASE("eigenvalues match the exact chart jacobian") {
  // Closed forms from tests/oracles/model_oracle.py (chart U1).
  const double r2 = std::numbers::sqrt2;
  const auto p2 = classify_equilibrium(field(), ChartId::U1, Eigen::Vector2d(1, 1));
  CHECK(p2.eigenvalues[0].real() == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(p2.eigenvalues[1].real() == doctest::Approx(-7.0).epsilon(1e-12));
  CHECK(p2.eigenvalues[2].real() == doctest::Approx(-7.0).epsilon(1e-12));
  const auto p1 = classify_equilibrium(field(), ChartId::U1, Eigen::Vector2d(2 + 2 * r2, 1));
  CHECK(p1.stability == Stability::saddle);
  CHECK(p1.eigenvalues[0].real() == doctest::Approx(16 + 4 * r2).epsilon(1e-12));
  CHECK(p1.eigenvalues[1].real() == doctest::Approx(-4 * r2).epsilon(1e-12));
  CHECK(p1.eigenvalues[2].real() == doctest::Approx(-8 - 16 * r2).epsilon(1e-12));
  const double s = std::sqrt(2 * (9 + 4 * r2));
  const auto p4 = classify_equilibrium(field(), ChartId::U1, Eigen::Vector2d(r2 / 2 - 0.5, r2 / 2 - 0.5));
  CHECK(p4.eigenvalues[0].real() == doctest::Approx(-8 + 5 * r2 + s).epsilon(1e-12));
  CHECK(p4.eigenvalues[1].real() == doctest::Approx(-4 + 2 * r2).epsilon(1e-12));
  CHECK(p4.eigenvalues[2].real() == doctest::Approx(-8 + 5 * r2 - s).epsilon(1e-12));
}

TEST_CASE("deduplication is stable under grid refinement") {
  EquilibriumSearchConfig fine;
  fine.grid = 128;
  const auto a = find_infinity_equilibria(field());
  const auto b = find_infinity_equilibria(field(), fine);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].chart == b[i].chart);
    CHECK((a[i].direction - b[i].direction).norm() < 1e-10);
  }
}
