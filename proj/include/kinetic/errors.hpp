#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kinetic {

/// Smallest admissible free space 1 - rho. States closer to jam density are
/// rejected rather than clamped.
inline constexpr double kRhoFloor = 1e-12;

/// Outputs of the forward transforms in [-kNegativeZeroWindow, 0) are snapped
/// to exactly zero.
inline constexpr double kNegativeZeroWindow = 1e-15;

/// Admissible monotonicity defect n_k <= n_{k+1} (1 + tol) of conservative
/// states produced by the finite-volume update.
inline constexpr double kMonotoneTolerance = 1e-12;

/// Base class for numerical failures (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A division by 1 - rho (or by a conservative component) would fall below
/// kRhoFloor.
class NearJamError : public NumericalError {
 public:
  NearJamError(const std::string& what, double free_space)
      : NumericalError(what), free_space_(free_space) {}
  double free_space() const noexcept { return free_space_; }

 private:
  double free_space_;
};

/// A state lies outside its representation's domain (simplex, cube, ...).
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The equilibrium distribution would have a negative component.
class RealizabilityError : public NumericalError {
 public:
  RealizabilityError(const std::string& what, std::string bound, double rho)
      : NumericalError(what), bound_(std::move(bound)), rho_(rho) {}
  const std::string& bound() const noexcept { return bound_; }
  double rho() const noexcept { return rho_; }

 private:
  std::string bound_;
  double rho_;
};

/// The finite-volume update left the invariant domain in some cell.
class InvariantViolation : public NumericalError {
 public:
  InvariantViolation(const std::string& what, std::size_t cell)
      : NumericalError(what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

/// Invalid configuration or model specification (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kinetic
