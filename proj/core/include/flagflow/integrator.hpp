#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "flagflow/compactify.hpp"
#include "flagflow/vector_field.hpp"

namespace flagflow::dyn {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.5;
  double min_step = 1e-14;
  double initial_step = 1e-4;
  double t_end = 10.0;
  std::size_t max_steps = 5'000'000;

  /// Throws std::invalid_argument on non-positive tolerances or
  /// min_step >= max_step.
  void validate() const;
};

enum class Termination {
  reached_t_end,
  blow_up_event,
  converged_to_point,
  step_size_collapse,
  step_limit,  ///< max_steps accepted steps without any other stop
};
std::string_view to_string(Termination t);

struct Sample {
  double t = 0.0;
  Vec3 state = Vec3::Zero();
};

/// Chart coordinates of a compactified sample (parallel to Trajectory::samples).
struct ChartSample {
  compact::ChartId chart = compact::ChartId::Ambient;
  Vec3 z = Vec3::Zero();
};

struct ChartSwitch {
  double t = 0.0;
  compact::ChartId from = compact::ChartId::Ambient;
  compact::ChartId to = compact::ChartId::Ambient;
};

struct Trajectory {
  std::vector<Sample> samples;
  Termination termination = Termination::reached_t_end;
  std::vector<ChartSample> charts;  ///< empty for ambient runs
  std::vector<ChartSwitch> chart_log;

  const Sample& back() const { return samples.back(); }
  bool compactified() const { return !charts.empty(); }
};

struct Events {
  /// Stop with blow_up_event when max_i |x_i| reaches this radius.
  std::optional<double> blow_up_radius;
  /// Stop with converged_to_point after a full step within target_radius of target.
  std::optional<Vec3> target;
  double target_radius = 1e-6;
};

/// Adaptive Dormand-Prince 5(4) integration; one sample per accepted step.
Trajectory integrate(const VectorField& field, const Vec3& x0, const IntegratorConfig& cfg);

/// As integrate(), with blow-up and convergence events. The blow-up time is
/// located on the dense-output interpolant by bisection to 1e-9.
Trajectory integrate_with_events(const VectorField& field, const Vec3& x0, const IntegratorConfig& cfg,
                                 const Events& events);

struct CompactOptions {
  double switch_threshold = 0.3;  ///< leave a chart when |dividing coordinate| drops below this
  double hysteresis = 0.05;       ///< ...and another chart's exceeds it by this margin
  double stationary_tol = 1e-11;  ///< converged when |chart field| falls below this
  std::optional<Vec3> target;     ///< optional target in ball coordinates
  double target_radius = 1e-6;
};

/// Integrates the compactified flow of f from the ambient point x0, moving
/// between charts as needed. Samples are reported in ball coordinates pi(x);
/// `t` is the accumulated chart time, a positive reparametrization of the
/// ambient time.
Trajectory integrate_compactified(const compact::CompactifiedField& f, const Vec3& x0, const IntegratorConfig& cfg,
                                  const CompactOptions& opts = {});

/// Ball-coordinate distance from pi(x) to the ray through p'_j.
double distance_to_line(const Vec3& x, const Vec3& direction);
/// Same, for a point already in ball coordinates.
double ball_distance_to_line(const Vec3& u, const Vec3& direction);

}  // namespace flagflow::dyn
