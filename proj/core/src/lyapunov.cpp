#include "flagflow/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "flagflow/detail/dopri5.hpp"

namespace flagflow::dyn {

namespace {

using Stepper = detail::Dopri5<12>;
using Augmented = Stepper::State;

Augmented pack(const Vec3& x, const Mat3& v) {
  Augmented s;
  s.head<3>() = x;
  s.segment<9>(3) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(v.data());
  return s;
}

Mat3 frame_of(const Augmented& s) { return Eigen::Map<const Mat3>(s.data() + 3); }

const LyapunovSnapshot& snapshot_near(const std::vector<LyapunovSnapshot>& h, double t) {
  const auto it = std::lower_bound(h.begin(), h.end(), t,
                                   [](const LyapunovSnapshot& s, double v) { return s.t < v; });
  return it == h.end() ? h.back() : *it;
}

double max_drift(const LyapunovSnapshot& a, const LyapunovSnapshot& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 3; ++i) m = std::max(m, std::abs(a.exponents[i] - b.exponents[i]));
  return m;
}

}  // namespace

void LyapunovConfig::validate() const {
  integrator.validate();
  if (!(renorm_dt > 0.0)) throw std::invalid_argument("lyapunov: renorm_dt must be positive");
  if (!(t_max >= renorm_dt)) throw std::invalid_argument("lyapunov: t_max must be >= renorm_dt");
  if (!(transient >= 0.0)) throw std::invalid_argument("lyapunov: transient must be >= 0");
  if (!(t_max > transient + renorm_dt)) throw std::invalid_argument("lyapunov: t_max must exceed transient + renorm_dt");
  if (!(t_min >= 0.0)) throw std::invalid_argument("lyapunov: t_min must be >= 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("lyapunov: tolerance must be positive");
  if (!(divergence_radius > 0.0)) throw std::invalid_argument("lyapunov: divergence_radius must be positive");
}

Vec3 gram_schmidt(Mat3& v) {
  Vec3 norms;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < i; ++j) v.col(i) -= v.col(j).dot(v.col(i)) * v.col(j);
    norms[i] = v.col(i).norm();
    if (!(norms[i] > 0.0) || !std::isfinite(norms[i])) {
      throw std::domain_error("gram_schmidt: degenerate tangent frame");
    }
    v.col(i) /= norms[i];
  }
  return norms;
}

LyapunovSpectrum lyapunov_spectrum(const VectorField& field, const Vec3& x0, const LyapunovConfig& cfg) {
  cfg.validate();
  auto rhs = [&field](const Augmented& s) -> Augmented {
    const Vec3 x = s.head<3>();
    const Vec3 fx = field.rhs(x);
    const Mat3 dv = field.jacobian_at(x) * frame_of(s);
    return pack(fx, dv);
  };

  LyapunovSpectrum out;
  Stepper stepper({cfg.integrator.rel_tol, cfg.integrator.abs_tol, cfg.integrator.min_step,
                   std::min(cfg.integrator.max_step, cfg.renorm_dt)});
  Augmented s = pack(x0, Mat3::Identity());
  Augmented fs = rhs(s);
  double t = 0.0;
  double h = std::min(cfg.integrator.initial_step, cfg.renorm_dt);
  Vec3 log_sum = Vec3::Zero();
  double t_start = -1.0;  // averaging starts at the first renormalization past the transient

  auto finish = [&](double elapsed) {
    for (std::size_t i = 0; i < 3; ++i) out.exponents[i] = elapsed > 0.0 ? log_sum[static_cast<int>(i)] / elapsed : 0.0;
    std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());
    out.t_used = elapsed;
  };

  if (!fs.allFinite()) {
    out.base_diverged = true;
    finish(0.0);
    return out;
  }

  const auto blocks = static_cast<long>(std::ceil(cfg.t_max / cfg.renorm_dt - 1e-9));
  for (long block = 1; block <= blocks; ++block) {
    const double t_next = std::min(cfg.t_max, static_cast<double>(block) * cfg.renorm_dt);
    bool failed = false;
    while (t < t_next) {
      if (stepper.step(rhs, t, s, fs, h, t_next) == Stepper::Status::collapsed) {
        failed = true;
        break;
      }
    }
    const Vec3 x = s.head<3>();
    if (failed || !s.allFinite() || x.norm() > cfg.divergence_radius) {
      out.base_diverged = true;
      finish(t_start < 0.0 ? 0.0 : t - t_start);
      return out;
    }

    Mat3 v = frame_of(s);
    const Vec3 stretch = gram_schmidt(v).array().log().matrix();
    out.max_frame_defect = std::max(out.max_frame_defect, (v.transpose() * v - Mat3::Identity()).cwiseAbs().maxCoeff());
    s = pack(x, v);
    fs = rhs(s);

    if (t_start < 0.0) {
      if (t + 1e-12 >= cfg.transient) t_start = t;
      continue;
    }
    log_sum += stretch;
    const double elapsed = t - t_start;

    LyapunovSnapshot snap{elapsed, {}};
    for (int i = 0; i < 3; ++i) snap.exponents[static_cast<std::size_t>(i)] = log_sum[i] / elapsed;
    out.history.push_back(snap);

    if (elapsed >= cfg.t_min) {
      const auto& half = snapshot_near(out.history, 0.5 * elapsed);
      const auto& three_quarters = snapshot_near(out.history, 0.75 * elapsed);
      if (max_drift(snap, three_quarters) < cfg.tolerance && max_drift(three_quarters, half) < cfg.tolerance) {
        out.converged = true;
        finish(elapsed);
        return out;
      }
    }
  }
  finish(t_start < 0.0 ? 0.0 : t - t_start);
  return out;
}

}  // namespace flagflow::dyn
