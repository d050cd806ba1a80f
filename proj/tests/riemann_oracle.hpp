#pragma once

// Convergence of the Godunov scheme to the exact Riemann solution. The exact
// cell averages are integrated piece by piece between the wave positions,
// with wave speeds and intermediate states rebuilt from the oracle formulas.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kinetic/godunov.hpp"
#include "kinetic/state.hpp"
#include "oracles.hpp"

namespace riemann_oracle {

using oracle::Vec;

struct Pair {
  Vec w_left;
  Vec w_right;
};

struct Fan {
  std::vector<Vec> states;  // left, w^{M,0}, ..., w^{M,N-1}, right
  Vec speeds;               // sigma_0 .. sigma_N
};

inline Fan build_fan(const Pair& p, const Vec& v) {
  const std::size_t m = p.w_left.size();
  Fan fan;
  fan.states.push_back(p.w_left);
  for (std::size_t l = 0; l + 1 < m; ++l) {
    Vec mid = p.w_left;
    for (std::size_t k = 0; k <= l; ++k) mid[k] = p.w_right[k];
    fan.states.push_back(mid);
  }
  fan.states.push_back(p.w_right);
  for (std::size_t l = 0; l < m; ++l) fan.speeds.push_back(oracle::lambda_of_w(fan.states[l], v)[l]);
  return fan;
}

/// Random pair with densities below rho_max and every wave speed within
/// [-max_speed, max_speed].
inline Pair random_pair(std::mt19937_64& rng, const Vec& v, double rho_max, double max_speed) {
  for (;;) {
    const Pair p{oracle::diagonal_variables(oracle::random_state(rng, v.size(), rho_max)),
                 oracle::diagonal_variables(oracle::random_state(rng, v.size(), rho_max))};
    const Fan fan = build_fan(p, v);
    bool ok = true;
    for (const Vec& w : fan.states) {
      if (oracle::sum(oracle::primitive_from_w(w)) > rho_max) ok = false;
    }
    for (double s : fan.speeds) {
      if (std::abs(s) > max_speed) ok = false;
    }
    if (ok) return p;
  }
}

/// Exact cell averages of n on M cells at time t, interface at x = 0.5.
inline std::vector<Vec> exact_averages(const Fan& fan, std::size_t cells, double t) {
  const double dx = 1.0 / static_cast<double>(cells);
  const std::size_t m = fan.speeds.size();
  std::vector<Vec> n_states;
  for (const Vec& w : fan.states) n_states.push_back(oracle::conservative_from_w(w));
  std::vector<Vec> avg(cells, Vec(m, 0.0));
  for (std::size_t j = 0; j < cells; ++j) {
    const double a = static_cast<double>(j) * dx;
    const double b = a + dx;
    // Piece p lives between wave p-1 and wave p.
    for (std::size_t p = 0; p <= m; ++p) {
      const double lo = p == 0 ? a : std::max(a, 0.5 + fan.speeds[p - 1] * t);
      const double hi = p == m ? b : std::min(b, 0.5 + fan.speeds[p] * t);
      if (hi <= lo) continue;
      for (std::size_t i = 0; i < m; ++i) avg[j][i] += n_states[p][i] * (hi - lo) / dx;
    }
  }
  return avg;
}

/// L1 distance in n between the Godunov solution and the exact averages.
inline double godunov_error(const Pair& p, const kinetic::VelocityGrid& grid, std::size_t cells,
                            double t, double cfl = 0.5) {
  using namespace kinetic;
  const Vec v(grid.velocities().begin(), grid.velocities().end());
  const SpatialGrid space(cells, BoundaryMode::free);
  const Vec n_left = oracle::conservative_from_w(p.w_left);
  const Vec n_right = oracle::conservative_from_w(p.w_right);
  CellField field(cells, v.size());
  for (std::size_t j = 0; j < cells; ++j) {
    const Vec& src = space.center(j) < 0.5 ? n_left : n_right;
    std::copy(src.begin(), src.end(), field[j].begin());
  }
  AdvectionStepper stepper(grid, space);
  double now = 0.0;
  while (now < t) {
    double dt = cfl_dt(field, grid, space, cfl);
    if (now + dt >= t) dt = t - now;
    stepper.step(field, dt);
    now = now + dt >= t ? t : now + dt;
  }
  const auto exact = exact_averages(build_fan(p, v), cells, t);
  double err = 0.0;
  for (std::size_t j = 0; j < cells; ++j) {
    for (std::size_t i = 0; i < v.size(); ++i) err += std::abs(field[j][i] - exact[j][i]);
  }
  return err * space.dx();
}

/// Least-squares slope of log(error) against log(1/M).
inline double fitted_order(const std::vector<std::size_t>& cells, const Vec& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double x = -std::log(static_cast<double>(cells[i]));
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

struct Convergence {
  Vec errors;
  double order = 0.0;
  bool monotone = false;
};

inline Convergence converge(const Pair& p, const kinetic::VelocityGrid& grid,
                            const std::vector<std::size_t>& cells, double t) {
  Convergence c;
  for (std::size_t m : cells) c.errors.push_back(godunov_error(p, grid, m, t));
  c.monotone = true;
  for (std::size_t i = 1; i < c.errors.size(); ++i) {
    if (!(c.errors[i] < c.errors[i - 1])) c.monotone = false;
  }
  c.order = fitted_order(cells, c.errors);
  return c;
}

}  // namespace riemann_oracle
