#pragma once

// Velocity grids, the three state representations of the discrete-velocity
// traffic model and the exact eigen-structure of its hyperbolic part.
//
//   primitive     f_0..f_N   occupation per velocity class, on the unit simplex
//   diagonal      w_0..w_N   Riemann invariants, on the unit cube
//   conservative  n_0..n_N   n_k = prod_{j>=k} (1 - w_j), n_0 = 1 - rho
//
// The typed functions allocate their results. The span kernels in
// kinetic::kernels write into caller-provided storage and are what the solver
// uses in its inner loops.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kinetic {

/// Ordered discrete speeds 0 = v_0 < v_1 < ... < v_N = 1, N >= 1.
class VelocityGrid {
 public:
  /// Throws std::invalid_argument unless the list is strictly increasing,
  /// starts at exactly 0, ends at exactly 1 and has at least two entries.
  explicit VelocityGrid(std::vector<double> velocities);

  /// v_i = i / N.
  static VelocityGrid equidistant(std::size_t n);

  /// Highest velocity index N (the model has N + 1 classes).
  std::size_t n() const noexcept { return v_.size() - 1; }
  std::size_t size() const noexcept { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> velocities() const noexcept { return v_; }

  bool operator==(const VelocityGrid&) const = default;

 private:
  std::vector<double> v_;
};

struct KineticState {
  std::vector<double> f;
};

struct DiagonalState {
  std::vector<double> w;
};

struct ConservativeState {
  std::vector<double> n;
};

struct MacroMoments {
  double rho = 0.0;
  double q = 0.0;
  double e = 0.0;
};

/// Density, flux and second moment. Throws std::invalid_argument on a length
/// mismatch with the grid.
MacroMoments moments(const KineticState& state, const VelocityGrid& grid);

DiagonalState f_to_w(const KineticState& state);
KineticState w_to_f(const DiagonalState& state);
ConservativeState w_to_n(const DiagonalState& state);
DiagonalState n_to_w(const ConservativeState& state);
ConservativeState f_to_n(const KineticState& state);
KineticState n_to_f(const ConservativeState& state);

/// lambda_i = v_i - 1/(1-rho) sum_{j>i} (v_j - v_i) f_j, lambda_N = 1.
std::vector<double> eigenvalues_primitive(const KineticState& state,
                                          const VelocityGrid& grid);

/// lambda_i = 1 - sum_{j>i} (v_j - v_{j-1}) / n_j.
std::vector<double> eigenvalues_conservative(const ConservativeState& state,
                                             const VelocityGrid& grid);

std::vector<double> eigenvalues_diagonal(const DiagonalState& state,
                                         const VelocityGrid& grid);

/// Right eigenvector r_i: zero below i, one at i and
/// r_i^k = -f_k / (1 - sum_{j<=i} f_j) above.
std::vector<double> eigenvector(const KineticState& state,
                                const VelocityGrid& grid, std::size_t field);

struct SimplexCheck {
  bool ok = true;
  double rho = 0.0;
  /// First component below -tol, if any.
  std::optional<std::size_t> negative_index;
  std::string message;

  explicit operator bool() const noexcept { return ok; }
};

/// Passes iff min f_i >= -tol and rho <= 1 + tol.
SimplexCheck validate_simplex(std::span<const double> f, double tol);
inline SimplexCheck validate_simplex(const KineticState& state, double tol) {
  return validate_simplex(std::span<const double>(state.f), tol);
}

namespace kernels {

// Span kernels. Input and output spans must have equal length and must not
// alias unless stated otherwise. They throw the same errors as the typed API.

void f_to_w(std::span<const double> f, std::span<double> w);
void w_to_f(std::span<const double> w, std::span<double> f);
void w_to_n(std::span<const double> w, std::span<double> n);
void n_to_w(std::span<const double> n, std::span<double> w);
void f_to_n(std::span<const double> f, std::span<double> n);
void n_to_f(std::span<const double> n, std::span<double> f);

/// Eigenvalues from conservative variables. Each lambda_i reads only
/// n_{i+1..N}.
void eigenvalues_from_n(std::span<const double> n, std::span<const double> v,
                        std::span<double> lambda);

/// Throws unless n is a valid conservative state (positive, monotone within
/// kMonotoneTolerance, n_N <= 1, n_0 >= kRhoFloor).
void check_conservative(std::span<const double> n);

}  // namespace kernels

}  // namespace kinetic
