#pragma once

// Exact Riemann solution through the diagonal variables, the Godunov flux and
// the first-order conservative update on a uniform 1-D grid over [0, 1].

#include <cstddef>
#include <span>
#include <vector>

#include "kinetic/state.hpp"

namespace kinetic {

/// Row-major cells x components storage; one row per cell.
class CellField {
 public:
  CellField() = default;
  CellField(std::size_t cells, std::size_t components, double fill = 0.0)
      : cells_(cells), components_(components), data_(cells * components, fill) {}

  std::size_t cells() const noexcept { return cells_; }
  std::size_t components() const noexcept { return components_; }

  std::span<double> operator[](std::size_t cell) {
    return {data_.data() + cell * components_, components_};
  }
  std::span<const double> operator[](std::size_t cell) const {
    return {data_.data() + cell * components_, components_};
  }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const CellField&) const = default;

 private:
  std::size_t cells_ = 0;
  std::size_t components_ = 0;
  std::vector<double> data_;
};

enum class BoundaryMode { periodic, free };

/// M uniform cells on [0, 1].
class SpatialGrid {
 public:
  /// Throws std::invalid_argument for M < 2.
  SpatialGrid(std::size_t cells, BoundaryMode mode);

  std::size_t cells() const noexcept { return cells_; }
  double dx() const noexcept { return dx_; }
  double center(std::size_t cell) const noexcept {
    return (static_cast<double>(cell) + 0.5) * dx_;
  }
  BoundaryMode mode() const noexcept { return mode_; }

 private:
  std::size_t cells_;
  double dx_;
  BoundaryMode mode_;
};

/// Wave structure of a Riemann problem in diagonal variables. Across wave l
/// only w_l jumps, so the states between the waves are
///   w^{M,l} = (w^R_0..w^R_l, w^L_{l+1}..w^L_N),  l = 0..N-1.
struct RiemannFan {
  DiagonalState left;
  DiagonalState right;
  /// w^{M,0} .. w^{M,N-1}.
  std::vector<DiagonalState> intermediate;
  /// sigma_l = lambda_l(w^{M,l-1}), with w^{M,-1} = left. Nondecreasing;
  /// sigma_N = 1.
  std::vector<double> speeds;
  /// Index l0 with sigma_{l0} < 0 <= sigma_{l0+1}; -1 when every wave moves
  /// right (a zero-speed wave counts as right-going).
  int selected = -1;

  /// State between waves `l` and `l + 1` for l in [-1, N].
  const DiagonalState& state_after(int l) const;
  const DiagonalState& godunov_state() const { return state_after(selected); }
};

RiemannFan riemann_fan(const DiagonalState& left, const DiagonalState& right,
                       const VelocityGrid& grid);

/// Self-similar exact solution at xi = x / t. At xi equal to a wave speed the
/// right limit is returned.
DiagonalState exact_riemann_sample(const RiemannFan& fan, double xi);

/// lambda_i(n^G) n^G_i at the Godunov state n^G.
std::vector<double> godunov_flux(const DiagonalState& left, const DiagonalState& right,
                                 const VelocityGrid& grid);

/// dt = cfl dx / max_cells max(|lambda_0|, 1). Throws NearJamError with the
/// cell index when a cell is at jam density.
double cfl_dt(const CellField& conservative, const VelocityGrid& grid, const SpatialGrid& space,
              double cfl);

/// One ghost cell per side: periodic wraps, free copies the adjacent cell.
CellField apply_bc(const CellField& field, BoundaryMode mode);

/// Conservative first-order update in n-variables. Holds the scratch space so
/// repeated steps do not allocate.
class AdvectionStepper {
 public:
  AdvectionStepper(const VelocityGrid& grid, const SpatialGrid& space);

  /// n_j -= dt/dx (F_{j+1/2} - F_{j-1/2}). Throws InvariantViolation with the
  /// cell index if a cell leaves the conservative domain.
  void step(CellField& conservative, double dt);

  /// Interface fluxes of the last step; row k is the flux at x = k dx.
  const CellField& fluxes() const noexcept { return fluxes_; }

 private:
  VelocityGrid grid_;
  SpatialGrid space_;
  CellField ghosted_;
  CellField fluxes_;
  std::vector<double> scratch_;
};

CellField advection_step(const CellField& conservative, const VelocityGrid& grid,
                         const SpatialGrid& space, double dt);

namespace kernels {

/// Scratch needed by godunov_flux for N + 1 components.
inline std::size_t godunov_scratch_size(std::size_t components) { return 5 * components; }

/// Godunov flux between two conservative states. `scratch` holds at least
/// godunov_scratch_size(N + 1) values.
void godunov_flux(std::span<const double> n_left, std::span<const double> n_right,
                  std::span<const double> velocities, std::span<double> scratch,
                  std::span<double> flux);

}  // namespace kernels

/// Worker count for the interface-flux loop (no-op without OpenMP). Results
/// do not depend on it.
void set_worker_count(int workers);
int worker_count();

}  // namespace kinetic
