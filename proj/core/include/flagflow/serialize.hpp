#pragma once

// Stable text formats for reports. JSON documents carry schema_version 1;
// CSV uses '.' decimals with 17 significant digits and a header row.

#include <string>
#include <vector>

#include "flagflow/compactify.hpp"
#include "flagflow/experiments.hpp"
#include "flagflow/integrator.hpp"

namespace flagflow::io {

inline constexpr int kSchemaVersion = 1;

/// "%.17g" formatting of a double.
std::string format_real(double v);

/// {schema_version, equilibria: [{chart, z, direction, eigenvalues:[{re,im}], stability, first_octant}]}
std::string equilibria_json(const std::vector<compact::InfinityEquilibrium>& eqs);

/// Header `t,x1,x2,x3` plus `,chart,z1,z2,z3` for compactified runs.
std::string trajectory_csv(const dyn::Trajectory& tr);

/// Header `line,chart,lambda1,lambda2,lambda3,t_used,converged`.
std::string lyapunov_csv(const std::vector<experiments::LineSpectrumRow>& rows);
std::string lyapunov_json(const std::vector<experiments::LineSpectrumRow>& rows);

std::string basin_json(const experiments::BasinReport& report);

std::string limit_json(const experiments::LimitClassification& c);

}  // namespace flagflow::io
