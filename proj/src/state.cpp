#include "kinetic/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kinetic/errors.hpp"

namespace kinetic {

namespace {

double snap_negative_zero(double x, double window) {
  return (x < 0.0 && x >= -window) ? 0.0 : x;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": length mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(msg.str());
  }
}

void require_nonempty(std::size_t size, const char* what) {
  if (size < 2) {
    throw std::invalid_argument(std::string(what) + ": a state needs at least two components");
  }
}

double free_space_or_throw(double rho, const char* what) {
  const double free_space = 1.0 - rho;
  if (!(free_space >= kRhoFloor)) {
    std::ostringstream msg;
    msg << what << ": near-jam state, 1 - rho = " << free_space;
    throw NearJamError(msg.str(), free_space);
  }
  return free_space;
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi;
  return s;
}

void check_simplex_components(std::span<const double> f, const char* what) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] >= -kNegativeZeroWindow)) {
      std::ostringstream msg;
      msg << what << ": negative occupation f_" << i << " = " << f[i];
      throw DomainError(msg.str());
    }
  }
}

void check_cube(std::span<const double> w, const char* what) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= -kNegativeZeroWindow && w[i] < 1.0)) {
      std::ostringstream msg;
      msg << what << ": w_" << i << " = " << w[i] << " outside [0, 1)";
      throw DomainError(msg.str());
    }
  }
}

}  // namespace

VelocityGrid::VelocityGrid(std::vector<double> velocities) : v_(std::move(velocities)) {
  if (v_.size() < 2) {
    throw std::invalid_argument("VelocityGrid: need at least two velocities (N >= 1)");
  }
  if (v_.front() != 0.0 || v_.back() != 1.0) {
    throw std::invalid_argument("VelocityGrid: first velocity must be 0 and last must be 1");
  }
  for (std::size_t i = 1; i < v_.size(); ++i) {
    if (!(v_[i] > v_[i - 1])) {
      throw std::invalid_argument("VelocityGrid: velocities must be strictly increasing");
    }
  }
}

VelocityGrid VelocityGrid::equidistant(std::size_t n) {
  if (n < 1) throw std::invalid_argument("VelocityGrid::equidistant: N must be >= 1");
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = static_cast<double>(i) / static_cast<double>(n);
  v[n] = 1.0;
  return VelocityGrid(std::move(v));
}

MacroMoments moments(const KineticState& state, const VelocityGrid& grid) {
  require_same_size(state.f.size(), grid.size(), "moments");
  MacroMoments m;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double f = state.f[i];
    const double v = grid[i];
    m.rho += f;
    m.q += v * f;
    m.e += v * v * f;
  }
  return m;
}

namespace kernels {

void f_to_w(std::span<const double> f, std::span<double> w) {
  require_same_size(f.size(), w.size(), "f_to_w");
  require_nonempty(f.size(), "f_to_w");
  check_simplex_components(f, "f_to_w");
  free_space_or_throw(sum(f), "f_to_w");
  double prefix = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    w[k] = snap_negative_zero(f[k] / (1.0 - prefix), kNegativeZeroWindow);
    prefix += f[k];
  }
}

void w_to_f(std::span<const double> w, std::span<double> f) {
  require_same_size(f.size(), w.size(), "w_to_f");
  require_nonempty(w.size(), "w_to_f");
  check_cube(w, "w_to_f");
  double remaining = 1.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double wk = w[k];
    f[k] = snap_negative_zero(wk * remaining, kNegativeZeroWindow);
    remaining *= 1.0 - wk;
  }
}

void w_to_n(std::span<const double> w, std::span<double> n) {
  require_same_size(n.size(), w.size(), "w_to_n");
  require_nonempty(w.size(), "w_to_n");
  check_cube(w, "w_to_n");
  double product = 1.0;
  for (std::size_t k = w.size(); k-- > 0;) {
    product *= 1.0 - w[k];
    n[k] = product;
  }
}

void check_conservative(std::span<const double> n) {
  require_nonempty(n.size(), "conservative state");
  const std::size_t last = n.size() - 1;
  if (!(n[0] >= kRhoFloor)) {
    std::ostringstream msg;
    msg << "conservative state: near-jam, n_0 = 1 - rho = " << n[0];
    throw NearJamError(msg.str(), n[0]);
  }
  for (std::size_t k = 0; k < last; ++k) {
    if (!(n[k] <= n[k + 1] * (1.0 + kMonotoneTolerance))) {
      std::ostringstream msg;
      msg << "conservative state: n_" << k << " = " << n[k] << " exceeds n_" << k + 1 << " = "
          << n[k + 1];
      throw DomainError(msg.str());
    }
  }
  if (!(n[last] <= 1.0 + kMonotoneTolerance)) {
    std::ostringstream msg;
    msg << "conservative state: n_" << last << " = " << n[last] << " exceeds 1";
    throw DomainError(msg.str());
  }
}

void n_to_w(std::span<const double> n, std::span<double> w) {
  require_same_size(n.size(), w.size(), "n_to_w");
  check_conservative(n);
  const std::size_t last = n.size() - 1;
  for (std::size_t k = 0; k < last; ++k) {
    w[k] = snap_negative_zero(1.0 - n[k] / n[k + 1], kMonotoneTolerance);
  }
  w[last] = snap_negative_zero(1.0 - n[last], kMonotoneTolerance);
}

void f_to_n(std::span<const double> f, std::span<double> n) {
  require_same_size(f.size(), n.size(), "f_to_n");
  require_nonempty(f.size(), "f_to_n");
  check_simplex_components(f, "f_to_n");
  const double free_space = free_space_or_throw(sum(f), "f_to_n");
  double prefix = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    n[k] = free_space / (1.0 - prefix);
    prefix += f[k];
  }
}

void n_to_f(std::span<const double> n, std::span<double> f) {
  require_same_size(f.size(), n.size(), "n_to_f");
  check_conservative(n);
  const std::size_t last = n.size() - 1;
  const double n0 = n[0];
  for (std::size_t k = 0; k < last; ++k) {
    f[k] = snap_negative_zero(n0 * (1.0 / n[k] - 1.0 / n[k + 1]), kMonotoneTolerance);
  }
  f[last] = snap_negative_zero(n0 * (1.0 / n[last] - 1.0), kMonotoneTolerance);
}

void eigenvalues_from_n(std::span<const double> n, std::span<const double> v,
                        std::span<double> lambda) {
  require_same_size(n.size(), v.size(), "eigenvalues");
  require_same_size(n.size(), lambda.size(), "eigenvalues");
  const std::size_t last = n.size() - 1;
  lambda[last] = 1.0;
  double tail = 0.0;
  for (std::size_t i = last; i-- > 0;) {
    tail += (v[i + 1] - v[i]) / n[i + 1];
    lambda[i] = 1.0 - tail;
  }
}

}  // namespace kernels

DiagonalState f_to_w(const KineticState& state) {
  DiagonalState out{std::vector<double>(state.f.size())};
  kernels::f_to_w(state.f, out.w);
  return out;
}

KineticState w_to_f(const DiagonalState& state) {
  KineticState out{std::vector<double>(state.w.size())};
  kernels::w_to_f(state.w, out.f);
  return out;
}

ConservativeState w_to_n(const DiagonalState& state) {
  ConservativeState out{std::vector<double>(state.w.size())};
  kernels::w_to_n(state.w, out.n);
  return out;
}

DiagonalState n_to_w(const ConservativeState& state) {
  DiagonalState out{std::vector<double>(state.n.size())};
  kernels::n_to_w(state.n, out.w);
  return out;
}

ConservativeState f_to_n(const KineticState& state) {
  ConservativeState out{std::vector<double>(state.f.size())};
  kernels::f_to_n(state.f, out.n);
  return out;
}

KineticState n_to_f(const ConservativeState& state) {
  KineticState out{std::vector<double>(state.n.size())};
  kernels::n_to_f(state.n, out.f);
  return out;
}

std::vector<double> eigenvalues_primitive(const KineticState& state, const VelocityGrid& grid) {
  require_same_size(state.f.size(), grid.size(), "eigenvalues_primitive");
  const std::span<const double> f = state.f;
  const double free_space = free_space_or_throw(sum(f), "eigenvalues_primitive");
  const std::size_t last = grid.n();
  std::vector<double> lambda(grid.size());
  for (std::size_t i = 0; i < last; ++i) {
    double tail = 0.0;
    for (std::size_t j = i + 1; j <= last; ++j) tail += (grid[j] - grid[i]) * f[j];
    lambda[i] = grid[i] - tail / free_space;
  }
  lambda[last] = 1.0;
  return lambda;
}

std::vector<double> eigenvalues_conservative(const ConservativeState& state,
                                             const VelocityGrid& grid) {
  require_same_size(state.n.size(), grid.size(), "eigenvalues_conservative");
  kernels::check_conservative(state.n);
  std::vector<double> lambda(grid.size());
  kernels::eigenvalues_from_n(state.n, grid.velocities(), lambda);
  return lambda;
}

std::vector<double> eigenvalues_diagonal(const DiagonalState& state, const VelocityGrid& grid) {
  require_same_size(state.w.size(), grid.size(), "eigenvalues_diagonal");
  // lambda depends on w_1..w_N only, so no jam check on w_0 is needed here.
  const ConservativeState n = w_to_n(state);
  std::vector<double> lambda(grid.size());
  kernels::eigenvalues_from_n(n.n, grid.velocities(), lambda);
  return lambda;
}

std::vector<double> eigenvector(const KineticState& state, const VelocityGrid& grid,
                                std::size_t field) {
  require_same_size(state.f.size(), grid.size(), "eigenvector");
  if (field > grid.n()) throw std::invalid_argument("eigenvector: field index out of range");
  const std::span<const double> f = state.f;
  free_space_or_throw(sum(f), "eigenvector");
  double prefix = 0.0;
  for (std::size_t j = 0; j <= field; ++j) prefix += f[j];
  const double denom = 1.0 - prefix;
  std::vector<double> r(grid.size(), 0.0);
  r[field] = 1.0;
  for (std::size_t k = field + 1; k <= grid.n(); ++k) r[k] = -f[k] / denom;
  return r;
}

SimplexCheck validate_simplex(std::span<const double> f, double tol) {
  SimplexCheck check;
  check.rho = sum(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] >= -tol)) {
      check.ok = false;
      check.negative_index = i;
      std::ostringstream msg;
      msg << "f_" << i << " = " << f[i] << " is negative";
      check.message = msg.str();
      return check;
    }
  }
  if (!(check.rho <= 1.0 + tol)) {
    check.ok = false;
    std::ostringstream msg;
    msg << "rho = " << check.rho << " exceeds 1";
    check.message = msg.str();
  }
  return check;
}

}  // namespace kinetic
