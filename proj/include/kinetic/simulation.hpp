#pragma once

// Initial data, the advection/relaxation splitting loop and its diagnostics.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kinetic/config.hpp"
#include "kinetic/equilibria.hpp"
#include "kinetic/godunov.hpp"
#include "kinetic/state.hpp"

namespace kinetic {

/// Per-cell primitive field at one instant. Macroscopic moments are computed
/// from f on request.
struct FieldSnapshot {
  double time = 0.0;
  VelocityGrid grid;
  std::vector<double> x;
  CellField f;

  std::vector<double> rho() const;
  std::vector<double> q() const;
  /// Domain-integrated density, midpoint rule.
  double mass() const;
};

struct PersistenceSeries {
  std::vector<double> t;
  std::vector<double> I;
};

/// sum_j |rho_j - rho_ref| dx.
double persistence_I(std::span<const double> rho, double rho_ref);
double persistence_I(const FieldSnapshot& snapshot, double rho_ref);

struct RunMetadata {
  std::size_t steps = 0;
  double final_time = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  /// Largest |mass(t) - mass(0)| over the recorded instants.
  double max_mass_drift = 0.0;
  double reference_density = 0.0;
};

struct RunResult {
  std::vector<FieldSnapshot> snapshots;
  PersistenceSeries series;
  RunMetadata metadata;
};

/// Two-carrier data with mass rho and flux F(rho) on each side of x = 1/2
/// (cells with center <= 1/2 take the left state). Carriers must be grid
/// velocities. An infeasible flux raises ConfigError with the computed
/// coefficients unless `project_infeasible`, which clips the flux to the
/// range the carriers can carry.
CellField ic_riemann_dirac(double rho_left, double rho_right, std::array<double, 2> carriers_left,
                           std::array<double, 2> carriers_right,
                           const FundamentalDiagram& diagram, const VelocityGrid& grid,
                           const SpatialGrid& space, bool project_infeasible = false);

/// f_i(x) = (base + amplitude sin(2 pi wavenumber x)) / (N + 1) at cell centers.
CellField ic_sinusoidal(double base, double amplitude, double wavenumber,
                        const VelocityGrid& grid, const SpatialGrid& space);

/// Builds the configured initial field and checks it lies on the simplex.
CellField build_initial_field(const SimConfig& config, const EquilibriumModel& model,
                              const SpatialGrid& space);

/// Optional per-step hook: (step, time).
using StepObserver = std::function<void(std::size_t, double)>;

/// Advection then (optionally) implicit relaxation each step; dt from the CFL
/// bound, shortened to land exactly on snapshot times and T. Numerical
/// failures are rethrown with the step index.
RunResult run(const SimConfig& config, const StepObserver& observer = {});
/// Same loop from an explicit initial primitive field.
RunResult run(const SimConfig& config, const CellField& initial,
              const StepObserver& observer = {});

}  // namespace kinetic
