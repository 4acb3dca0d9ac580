#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "flagflow/compactify.hpp"
#include "flagflow/integrator.hpp"
#include "flagflow/lyapunov.hpp"
#include "flagflow/su3flag.hpp"

namespace flagflow::experiments {

/// Compactified form of the quadratic Ricci system, built once.
const compact::CompactifiedField& compactified_ricci_field();

/// Ball-coordinate distance from pi(x) to the invariant ray gamma_j.
double distance_to_line(const Vec3& x, su3::LineId j);

// --- no interior equilibria -------------------------------------------------

/// |poly_rhs(d)| for a direction d (not required to be unit length).
double octant_speed(const Vec3& d);

struct ScanResult {
  int resolution = 0;
  double minimum = 0.0;       ///< min of |poly_rhs| over the closed octant of the unit sphere
  Vec3 argmin = Vec3::Zero();
  double grid_minimum = 0.0;  ///< before descent polishing
};

/// Grid search over the closed first-octant unit sphere (barycentric
/// lattice with `resolution` subdivisions per edge), followed by projected
/// descent from every lattice local minimum. A positive minimum means the
/// origin is the only zero of the quadratic field in the closed octant cone.
/// Throws std::invalid_argument if resolution < 50.
ScanResult no_interior_equilibria_scan(int resolution);

// --- cylinder basins --------------------------------------------------------

struct BasinConfig {
  int line = 2;
  double epsilon = 0.05;   ///< cylinder radius in ball coordinates
  double delta = 0.6;      ///< ambient exclusion radius around the origin
  int samples = 200;
  std::uint64_t seed = 7;
  double max_ball_radius = 0.98;
  double convergence_radius = 1e-3;
  dyn::IntegratorConfig integrator{.t_end = 200.0};
  dyn::CompactOptions compact{};
  unsigned threads = 0;

  /// Throws std::invalid_argument unless 0 < epsilon <= 0.1, delta >= 0.5, samples >= 1.
  void validate() const;
};

struct BasinSample {
  int index = 0;
  Vec3 start = Vec3::Zero();  ///< ball coordinates
  Vec3 end = Vec3::Zero();    ///< ball coordinates
  dyn::Termination termination = dyn::Termination::reached_t_end;
  bool converged = false;
  double max_deviation = 0.0;
};

struct BasinReport {
  int line = 2;
  double epsilon = 0.0;
  double delta = 0.0;
  int samples = 0;
  double converged_fraction = 0.0;
  double max_line_deviation = 0.0;
  std::vector<BasinSample> records;
};

/// Ball-coordinate start point of sample `index`; depends only on (cfg, index).
Vec3 basin_start_point(const BasinConfig& cfg, int index);

/// Integrates points drawn uniformly from the solid cylinder of radius
/// epsilon around gamma_j (ball radii between pi(delta) and max_ball_radius)
/// and records which of them end at p'_j.
BasinReport cylinder_basin(const BasinConfig& cfg);

// --- Lyapunov spectra along the lines ------------------------------------

struct LineSpectraConfig {
  dyn::LyapunovConfig lyapunov{};
  std::vector<compact::ChartId> charts{compact::ChartId::U1};
  double start_radius = 2.0;  ///< base point is start_radius * p'_j mapped to the chart
};

struct LineSpectrumRow {
  int line = 1;
  compact::ChartId chart = compact::ChartId::U1;
  Vec3 start = Vec3::Zero();  ///< chart coordinates of the base point
  dyn::LyapunovSpectrum spectrum;
};

Vec3 line_spectrum_start(su3::LineId j, compact::ChartId chart, double radius);

/// Lyapunov spectra of the compactified flow along gamma_1..gamma_4, one row
/// per (line, chart), lines outermost.
std::vector<LineSpectrumRow> line_spectra(const LineSpectraConfig& cfg = {});

// --- limit metrics ----------------------------------------------------------

enum class LimitKind { normal_einstein, einstein, non_einstein };
std::string_view to_string(LimitKind k);

struct LimitConfig {
  dyn::IntegratorConfig integrator{.t_end = 200.0};
  dyn::CompactOptions compact{};
  double diagonal_tol = 1e-6;
  double einstein_tol = 1e-8;
};

struct LimitClassification {
  Vec3 limit_direction = Vec3::Zero();
  double einstein_residual_at_limit = 0.0;  ///< +inf when the limit leaves the open octant
  LimitKind kind = LimitKind::non_einstein;
  dyn::Termination termination = dyn::Termination::reached_t_end;
  Vec3 end_ball = Vec3::Zero();
};

/// Einstein residual of a direction read as a metric; +inf off the open octant.
double direction_einstein_residual(const Vec3& d);

LimitClassification classify_limit(const su3::MetricParams& x0, const LimitConfig& cfg = {});

}  // namespace flagflow::experiments
