#pragma once

#include <array>
#include <vector>

#include "flagflow/integrator.hpp"
#include "flagflow/vector_field.hpp"

namespace flagflow::dyn {

struct LyapunovConfig {
  IntegratorConfig integrator{};
  double renorm_dt = 0.1;    ///< time between Gram-Schmidt renormalizations
  double t_max = 500.0;      ///< hard stop
  double transient = 10.0;   ///< spin-up time whose stretch factors are discarded
  double t_min = 20.0;       ///< no convergence test before this much averaging time
  double tolerance = 1e-3;   ///< max allowed drift of the running averages across the last two quarters
  double divergence_radius = 1e12;

  void validate() const;
};

struct LyapunovSnapshot {
  double t = 0.0;                     ///< averaging time
  std::array<double, 3> exponents{};  ///< running averages in Gram-Schmidt column order
};

struct LyapunovSpectrum {
  std::array<double, 3> exponents{};  ///< sorted descending
  double t_used = 0.0;  ///< averaging time, excluding the transient
  bool converged = false;
  bool base_diverged = false;
  std::vector<LyapunovSnapshot> history;
  double max_frame_defect = 0.0;  ///< max |V^T V - I| right after each renormalization
};

/// Modified Gram-Schmidt on the columns of v; returns the column norms
/// before normalization. Columns must be linearly independent.
Vec3 gram_schmidt(Mat3& v);

/// Benettin estimate: co-integrates x' = F(x) with V' = J(x) V from V = I,
/// re-orthonormalizing every renorm_dt and averaging the log stretch factors
/// collected after the transient.
LyapunovSpectrum lyapunov_spectrum(const VectorField& field, const Vec3& x0, const LyapunovConfig& cfg = {});

}  // namespace flagflow::dyn
