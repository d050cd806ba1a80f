#include "kinetic/godunov.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kinetic/errors.hpp"

namespace kinetic {

namespace {

int g_workers = 0;

// Index of the last wave moving strictly left, scanning until the first
// non-negative speed.
int select_wave(std::span<const double> speeds) {
  int selected = -1;
  for (std::size_t l = 0; l < speeds.size(); ++l) {
    if (speeds[l] < 0.0) {
      selected = static_cast<int>(l);
    } else {
      break;
    }
  }
  return selected;
}

void require_jam_free(std::span<const double> n, const char* what) {
  if (!(n[0] >= kRhoFloor)) {
    std::ostringstream msg;
    msg << what << ": near-jam state in the Riemann fan, 1 - rho = " << n[0];
    throw NearJamError(msg.str(), n[0]);
  }
}

}  // namespace

void set_worker_count(int workers) { g_workers = std::max(workers, 0); }

int worker_count() {
#ifdef _OPENMP
  return g_workers > 0 ? g_workers : omp_get_max_threads();
#else
  return 1;
#endif
}

SpatialGrid::SpatialGrid(std::size_t cells, BoundaryMode mode)
    : cells_(cells), dx_(1.0 / static_cast<double>(cells)), mode_(mode) {
  if (cells < 2) throw std::invalid_argument("SpatialGrid: need at least 2 cells");
}

const DiagonalState& RiemannFan::state_after(int l) const {
  if (l < 0) return left;
  if (static_cast<std::size_t>(l) >= intermediate.size()) return right;
  return intermediate[static_cast<std::size_t>(l)];
}

RiemannFan riemann_fan(const DiagonalState& left, const DiagonalState& right,
                       const VelocityGrid& grid) {
  if (left.w.size() != grid.size() || right.w.size() != grid.size()) {
    throw std::invalid_argument("riemann_fan: state length does not match the velocity grid");
  }
  const std::size_t last = grid.n();
  RiemannFan fan;
  fan.left = left;
  fan.right = right;
  fan.intermediate.reserve(last);
  for (std::size_t l = 0; l < last; ++l) {
    DiagonalState mid = left;
    std::copy_n(right.w.begin(), l + 1, mid.w.begin());
    fan.intermediate.push_back(std::move(mid));
  }
  for (int l = -1; l <= static_cast<int>(last); ++l) {
    require_jam_free(w_to_n(fan.state_after(l)).n, "riemann_fan");
  }
  fan.speeds.resize(grid.size());
  for (std::size_t l = 0; l <= last; ++l) {
    const auto lambda = eigenvalues_diagonal(fan.state_after(static_cast<int>(l) - 1), grid);
    fan.speeds[l] = lambda[l];
  }
  fan.selected = select_wave(fan.speeds);
  return fan;
}

DiagonalState exact_riemann_sample(const RiemannFan& fan, double xi) {
  int crossed = 0;
  for (double s : fan.speeds) {
    if (s <= xi) ++crossed;
  }
  return fan.state_after(crossed - 1);
}

namespace kernels {

void godunov_flux(std::span<const double> n_left, std::span<const double> n_right,
                  std::span<const double> velocities, std::span<double> scratch,
                  std::span<double> flux) {
  const std::size_t m = velocities.size();
  if (n_left.size() != m || n_right.size() != m || flux.size() != m ||
      scratch.size() < godunov_scratch_size(m)) {
    throw std::invalid_argument("godunov_flux: length mismatch");
  }
  const std::span<double> w_left = scratch.subspan(0, m);
  const std::span<double> w_right = scratch.subspan(m, m);
  const std::span<double> speeds = scratch.subspan(2 * m, m);
  const std::span<double> w_mid = scratch.subspan(3 * m, m);
  const std::span<double> n_mid = scratch.subspan(4 * m, m);

  n_to_w(n_left, w_left);
  n_to_w(n_right, w_right);

  // lambda_l reads only components above l, all of which w^{M,l-1} shares
  // with the left state: every wave speed is an eigenvalue of w_left.
  w_to_n(w_left, n_mid);
  eigenvalues_from_n(n_mid, velocities, speeds);
  const int selected = select_wave(speeds);

  for (std::size_t k = 0; k < m; ++k) {
    w_mid[k] = static_cast<int>(k) <= selected ? w_right[k] : w_left[k];
  }
  w_to_n(w_mid, n_mid);
  require_jam_free(n_mid, "godunov_flux");
  eigenvalues_from_n(n_mid, velocities, speeds);
  for (std::size_t k = 0; k < m; ++k) flux[k] = speeds[k] * n_mid[k];
}

}  // namespace kernels

std::vector<double> godunov_flux(const DiagonalState& left, const DiagonalState& right,
                                 const VelocityGrid& grid) {
  if (left.w.size() != grid.size() || right.w.size() != grid.size()) {
    throw std::invalid_argument("godunov_flux: state length does not match the velocity grid");
  }
  const ConservativeState n_left = w_to_n(left);
  const ConservativeState n_right = w_to_n(right);
  std::vector<double> scratch(kernels::godunov_scratch_size(grid.size()));
  std::vector<double> flux(grid.size());
  kernels::godunov_flux(n_left.n, n_right.n, grid.velocities(), scratch, flux);
  return flux;
}

double cfl_dt(const CellField& conservative, const VelocityGrid& grid, const SpatialGrid& space,
              double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl_dt: need 0 < cfl <= 1");
  if (conservative.components() != grid.size()) {
    throw std::invalid_argument("cfl_dt: field width does not match the velocity grid");
  }
  double s_max = 1.0;
  for (std::size_t j = 0; j < conservative.cells(); ++j) {
    const auto n = conservative[j];
    if (!(n[0] >= kRhoFloor)) {
      std::ostringstream msg;
      msg << "cfl_dt: cell " << j << " is at jam density (1 - rho = " << n[0] << ")";
      throw NearJamError(msg.str(), n[0]);
    }
    double tail = 0.0;
    for (std::size_t i = grid.n(); i >= 1; --i) tail += (grid[i] - grid[i - 1]) / n[i];
    s_max = std::max(s_max, std::abs(1.0 - tail));
  }
  return cfl * space.dx() / s_max;
}

CellField apply_bc(const CellField& field, BoundaryMode mode) {
  const std::size_t cells = field.cells();
  if (cells == 0) throw std::invalid_argument("apply_bc: empty field");
  CellField out(cells + 2, field.components());
  for (std::size_t j = 0; j < cells; ++j) std::ranges::copy(field[j], out[j + 1].begin());
  const std::size_t left_src = mode == BoundaryMode::periodic ? cells - 1 : 0;
  const std::size_t right_src = mode == BoundaryMode::periodic ? 0 : cells - 1;
  std::ranges::copy(field[left_src], out[0].begin());
  std::ranges::copy(field[right_src], out[cells + 1].begin());
  return out;
}

AdvectionStepper::AdvectionStepper(const VelocityGrid& grid, const SpatialGrid& space)
    : grid_(grid),
      space_(space),
      ghosted_(space.cells() + 2, grid.size()),
      fluxes_(space.cells() + 1, grid.size()) {}

void AdvectionStepper::step(CellField& conservative, double dt) {
  const std::size_t cells = space_.cells();
  const std::size_t m = grid_.size();
  if (conservative.cells() != cells || conservative.components() != m) {
    throw std::invalid_argument("AdvectionStepper: field shape mismatch");
  }
  if (!(dt >= 0.0)) throw std::invalid_argument("AdvectionStepper: negative time step");

  for (std::size_t j = 0; j < cells; ++j) {
    std::ranges::copy(conservative[j], ghosted_[j + 1].begin());
  }
  const bool periodic = space_.mode() == BoundaryMode::periodic;
  std::ranges::copy(conservative[periodic ? cells - 1 : 0], ghosted_[0].begin());
  std::ranges::copy(conservative[periodic ? 0 : cells - 1], ghosted_[cells + 1].begin());

  const int workers = worker_count();
  const std::size_t per_worker = kernels::godunov_scratch_size(m);
  scratch_.resize(per_worker * static_cast<std::size_t>(workers));
  const std::span<const double> velocities = grid_.velocities();

  // Each interface is independent, so the fluxes are bitwise identical for any
  // worker count. Exceptions cannot cross the parallel region; keep the one at
  // the lowest interface.
  const long interfaces = static_cast<long>(cells + 1);
  long failed_at = interfaces;
  std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
#endif
  for (long k = 0; k < interfaces; ++k) {
#ifdef _OPENMP
    const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
#else
    const std::size_t tid = 0;
#endif
    const std::span<double> scratch(scratch_.data() + tid * per_worker, per_worker);
    try {
      const auto kk = static_cast<std::size_t>(k);
      kernels::godunov_flux(ghosted_[kk], ghosted_[kk + 1], velocities, scratch, fluxes_[kk]);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(kinetic_flux_failure)
#endif
      {
        if (k < failed_at) {
          failed_at = k;
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "interface " << failed_at << " (x = " << static_cast<double>(failed_at) * space_.dx()
          << "): " << e.what();
      throw InvariantViolation(msg.str(), static_cast<std::size_t>(failed_at));
    }
  }

  const double ratio = dt / space_.dx();
  for (std::size_t j = 0; j < cells; ++j) {
    const auto n = conservative[j];
    const auto left = fluxes_[j];
    const auto right = fluxes_[j + 1];
    for (std::size_t i = 0; i < m; ++i) n[i] -= ratio * (right[i] - left[i]);
    try {
      kernels::check_conservative(n);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "cell " << j << " left the invariant domain: " << e.what();
      throw InvariantViolation(msg.str(), j);
    }
  }
}

CellField advection_step(const CellField& conservative, const VelocityGrid& grid,
                         const SpatialGrid& space, double dt) {
  CellField out = conservative;
  AdvectionStepper stepper(grid, space);
  stepper.step(out, dt);
  return out;
}

}  // namespace kinetic
