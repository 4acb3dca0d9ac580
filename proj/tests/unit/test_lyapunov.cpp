#include <doctest.h>

#include <random>

#include <flagflow/lyapunov.hpp>
#include <flagflow/su3flag.hpp>

using namespace flagflow;
using namespace flagflow::dyn;

namespace {

VectorField diagonal_field() { return VectorField::linear(Vec3(-1, -2, -3).asDiagonal()); }

}  // namespace

TEST_CASE("gram-schmidt returns an orthonormal frame") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Mat3 v;
    for (int k = 0; k < 9; ++k) v.data()[k] = u(rng);
    const Mat3 original = v;
    const Vec3 norms = gram_schmidt(v);
    CHECK((v.transpose() * v - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    // The frame spans the same flag: V R = original with R upper triangular.
    const Mat3 r = v.transpose() * original;
    CHECK(std::abs(r(1, 0)) + std::abs(r(2, 0)) + std::abs(r(2, 1)) < 1e-12);
    CHECK(r.diagonal().isApprox(norms, 1e-12));
  }
  Mat3 singular = Mat3::Zero();
  CHECK_THROWS_AS(gram_schmidt(singular), std::domain_error);
}

TEST_CASE("linear diagnostic field gives its eigenvalues") {
  const auto s = lyapunov_spectrum(diagonal_field(), Vec3(1, 1, 1));
  CHECK(s.converged);
  CHECK_FALSE(s.base_diverged);
  CHECK(s.exponents[0] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(s.exponents[1] == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(s.exponents[2] == doctest::Approx(-3.0).epsilon(1e-6));
  CHECK(s.max_frame_defect < 1e-12);
  CHECK(s.t_used >= 20.0);
}

TEST_CASE("renormalization interval does not matter") {
  std::array<double, 3> ref{};
  for (double dt : {0.05, 0.1, 0.2}) {
    LyapunovConfig cfg;
    cfg.renorm_dt = dt;
    const auto s = lyapunov_spectrum(diagonal_field(), Vec3(0.3, -2, 5), cfg);
    REQUIRE(s.converged);
    if (dt == 0.05) ref = s.exponents;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(s.exponents[i] - ref[i]) < 2e-3);
  }
}

TEST_CASE("rotation adds nothing to the exponents") {
  Mat3 a;
  a << -1, 5, 0, -5, -1, 0, 0, 0, 2;
  const auto s = lyapunov_spectrum(VectorField::linear(a), Vec3(1, 0, 0));
  CHECK(s.converged);
  CHECK(s.exponents[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(s.exponents[1] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(s.exponents[2] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("diverging base trajectory is reported, not thrown") {
  const auto s = lyapunov_spectrum(su3::poly_flow_field(), Vec3(1, 1, 1));
  CHECK(s.base_diverged);
  CHECK_FALSE(s.converged);
}

TEST_CASE("config validation") {
  LyapunovConfig cfg;
  cfg.renorm_dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.t_max = 5.0;  // below the transient
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
