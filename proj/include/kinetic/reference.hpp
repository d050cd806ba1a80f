#pragma once

// Entropy solution of the scalar LWR Riemann problem for a concave flux.

#include <vector>

#include "kinetic/equilibria.hpp"
#include "kinetic/godunov.hpp"

namespace kinetic {

enum class LwrWaveKind { constant, shock, rarefaction };

struct LwrRiemann {
  LwrWaveKind kind = LwrWaveKind::constant;
  double rho_left = 0.0;
  double rho_right = 0.0;
  /// Fan edges; both equal the Rankine-Hugoniot speed for a shock.
  double speed_left = 0.0;
  double speed_right = 0.0;
  FundamentalDiagram diagram = FundamentalDiagram::lwr();

  /// Density at xi = (x - x0) / t; the right state at a shock.
  double sample(double xi) const;
};

/// Throws ConfigError unless F is concave on [0, 1].
LwrRiemann lwr_riemann_reference(double rho_left, double rho_right,
                                 const FundamentalDiagram& diagram);

/// Cell-center samples at time t for an initial jump at x0.
std::vector<double> sample_reference(const LwrRiemann& wave, const SpatialGrid& space, double t,
                                     double x0 = 0.5);

}  // namespace kinetic
