#include "flagflow/integrator.hpp"

#include <cmath>
#include <stdexcept>

#include "flagflow/detail/dopri5.hpp"

namespace flagflow::dyn {

namespace {

using Stepper = detail::Dopri5<3>;

// Step bound, in units of 1 / |J|_inf, for the compactified runs.
constexpr double kStabilityLimit = 2.0;

Stepper make_stepper(const IntegratorConfig& cfg) {
  return Stepper({cfg.rel_tol, cfg.abs_tol, cfg.min_step, cfg.max_step});
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("integrator: tolerances must be positive");
  if (!(min_step > 0.0) || !(max_step > min_step)) {
    throw std::invalid_argument("integrator: need 0 < min_step < max_step");
  }
  if (!(initial_step > 0.0)) throw std::invalid_argument("integrator: initial_step must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("integrator: t_end must be positive");
  if (max_steps == 0) throw std::invalid_argument("integrator: max_steps must be positive");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::reached_t_end: return "reached_t_end";
    case Termination::blow_up_event: return "blow_up_event";
    case Termination::converged_to_point: return "converged_to_point";
    case Termination::step_size_collapse: return "step_size_collapse";
    case Termination::step_limit: return "step_limit";
  }
  return "?";
}

Trajectory integrate(const VectorField& field, const Vec3& x0, const IntegratorConfig& cfg) {
  return integrate_with_events(field, x0, cfg, {});
}

Trajectory integrate_with_events(const VectorField& field, const Vec3& x0, const IntegratorConfig& cfg,
                                 const Events& events) {
  cfg.validate();
  if (events.blow_up_radius && !(*events.blow_up_radius > 0.0)) {
    throw std::invalid_argument("integrate: blow-up radius must be positive");
  }
  auto rhs = [&field](const Vec3& x) -> Vec3 { return field.rhs(x); };

  Trajectory tr;
  double t = 0.0;
  Vec3 y = x0;
  Vec3 fy = rhs(y);
  tr.samples.push_back({t, y});
  if (!y.allFinite() || !fy.allFinite()) {
    tr.termination = Termination::step_size_collapse;
    return tr;
  }
  if (events.blow_up_radius && y.lpNorm<Eigen::Infinity>() >= *events.blow_up_radius) {
    tr.termination = Termination::blow_up_event;
    return tr;
  }

  Stepper stepper = make_stepper(cfg);
  double h = cfg.initial_step;
  for (std::size_t n = 0; t < cfg.t_end; ++n) {
    if (n >= cfg.max_steps) {
      tr.termination = Termination::step_limit;
      return tr;
    }
    const Vec3 y_start = y;
    if (stepper.step(rhs, t, y, fy, h, cfg.t_end) == Stepper::Status::collapsed) {
      tr.termination = Termination::step_size_collapse;
      return tr;
    }

    if (events.blow_up_radius && y.lpNorm<Eigen::Infinity>() >= *events.blow_up_radius) {
      const double radius = *events.blow_up_radius;
      const double span = stepper.last_step();
      double lo = 0.0, hi = 1.0;
      while ((hi - lo) * span > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (stepper.dense(mid).lpNorm<Eigen::Infinity>() >= radius ? hi : lo) = mid;
      }
      tr.samples.push_back({stepper.last_start() + hi * span, stepper.dense(hi)});
      tr.termination = Termination::blow_up_event;
      return tr;
    }

    tr.samples.push_back({t, y});

    if (events.target && (y_start - *events.target).norm() < events.target_radius &&
        (y - *events.target).norm() < events.target_radius) {
      tr.termination = Termination::converged_to_point;
      return tr;
    }
  }
  tr.termination = Termination::reached_t_end;
  return tr;
}

Trajectory integrate_compactified(const compact::CompactifiedField& f, const Vec3& x0, const IntegratorConfig& cfg,
                                  const CompactOptions& opts) {
  using namespace compact;
  cfg.validate();
  if (!(opts.switch_threshold > 0.0 && opts.switch_threshold < 0.5) || !(opts.hysteresis >= 0.0)) {
    throw std::invalid_argument("integrate_compactified: need 0 < switch_threshold < 0.5, hysteresis >= 0");
  }
  if (!x0.allFinite()) throw std::invalid_argument("integrate_compactified: non-finite start");

  SpherePoint sphere = SpherePoint::from_ambient(x0);
  ChartId chart = best_chart(sphere);
  Vec3 z = chart_coords(sphere, chart).z;
  auto rhs = [&f, &chart](const Vec3& w) -> Vec3 { return f.chart(chart)(w); };

  Trajectory tr;
  auto record = [&](double t) {
    tr.samples.push_back({t, sphere.y().head<3>()});
    tr.charts.push_back({chart, z});
  };

  double t = 0.0;
  Vec3 fz = rhs(z);
  record(t);
  if (fz.norm() < opts.stationary_tol) {
    tr.termination = Termination::converged_to_point;
    return tr;
  }

  Stepper stepper = make_stepper(cfg);
  double h = cfg.initial_step;
  Vec3 ball = sphere.y().head<3>();
  for (std::size_t n = 0; t < cfg.t_end; ++n) {
    if (n >= cfg.max_steps) {
      tr.termination = Termination::step_limit;
      return tr;
    }
    const Vec3 ball_start = ball;
    // Keep h |lambda| inside the explicit stability region near the sinks;
    // otherwise the controller parks at the boundary and z never settles.
    const double stiffness = f.chart(chart).jacobian(z).cwiseAbs().rowwise().sum().maxCoeff();
    stepper.set_max_step(std::min(cfg.max_step, kStabilityLimit / stiffness));
    if (stepper.step(rhs, t, z, fz, h, cfg.t_end) == Stepper::Status::collapsed) {
      tr.termination = Termination::step_size_collapse;
      return tr;
    }
    sphere = chart_point_to_sphere({chart, z});
    ball = sphere.y().head<3>();
    record(t);

    if (fz.norm() < opts.stationary_tol) {
      tr.termination = Termination::converged_to_point;
      return tr;
    }
    if (opts.target && (ball_start - *opts.target).norm() < opts.target_radius &&
        (ball - *opts.target).norm() < opts.target_radius) {
      tr.termination = Termination::converged_to_point;
      return tr;
    }

    const double divider = std::abs(sphere.y()[chart_axis(chart)]);
    if (divider < opts.switch_threshold) {
      const ChartId next = best_chart(sphere);
      if (next != chart && std::abs(sphere.y()[chart_axis(next)]) > divider + opts.hysteresis) {
        tr.chart_log.push_back({t, chart, next});
        chart = next;
        z = chart_coords(sphere, chart).z;
        fz = rhs(z);
      }
    }
  }
  tr.termination = Termination::reached_t_end;
  return tr;
}

double ball_distance_to_line(const Vec3& u, const Vec3& direction) {
  const Vec3 d = direction.normalized();
  const double along = std::max(0.0, u.dot(d));
  return (u - along * d).norm();
}

double distance_to_line(const Vec3& x, const Vec3& direction) {
  return ball_distance_to_line(compact::ball_projection(x), direction);
}

}  // namespace flagflow::dyn
