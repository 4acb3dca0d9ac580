#pragma once

#include <string>
#include <vector>

#include <flagflow/compactify.hpp>
#include <flagflow/integrator.hpp>

namespace flagflow::cli {

struct PortraitInput {
  std::vector<compact::InfinityEquilibrium> equilibria;
  std::vector<dyn::Trajectory> trajectories;  ///< compactified runs (ball coordinates)
  bool draw_lines = true;                     ///< the four invariant rays
  int size = 640;
};

/// Static SVG of the unit ball seen along (1,1,1): equator circle, equilibria
/// as markers (filled on the near hemisphere), trajectories as polylines.
std::string portrait_svg(const PortraitInput& in);

}  // namespace flagflow::cli
