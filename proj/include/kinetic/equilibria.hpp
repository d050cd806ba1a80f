#pragma once

// Fundamental diagrams, second-moment closures, the three-moment equilibrium
// family with interior weights alpha_i, realizability and Chapman-Enskog
// stability evaluators, and the implicit relaxation step.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kinetic/state.hpp"

namespace kinetic {

using ScalarFn = std::function<double(double)>;

/// Equilibrium flux F(rho) on [0, 1] with F(0) = F(1) = 0 and F' <= 1.
class FundamentalDiagram {
 public:
  /// Missing derivatives fall back to central differences with h = 1e-7.
  FundamentalDiagram(std::string name, ScalarFn value, ScalarFn derivative = {},
                     ScalarFn second_derivative = {});

  /// rho (1 - rho)
  static FundamentalDiagram lwr();
  /// rho (1 - rho)^2
  static FundamentalDiagram cubic();
  /// "lwr" or "cubic"; throws ConfigError otherwise.
  static FundamentalDiagram from_name(const std::string& name);

  double operator()(double rho) const { return value_(rho); }
  double derivative(double rho) const { return derivative_(rho); }
  double second_derivative(double rho) const { return second_(rho); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  ScalarFn value_;
  ScalarFn derivative_;
  ScalarFn second_;
};

/// Moments of the interior weights: lambda_w = sum alpha_i v_i and
/// gamma = sum alpha_i / v_i.
struct WeightMoments {
  double lambda_w = 0.0;
  double gamma = 0.0;
};

/// Second moment E(rho) of the equilibrium distribution.
class SecondMoment {
 public:
  SecondMoment(std::string name, ScalarFn value, ScalarFn derivative = {});

  /// E = F.
  static SecondMoment equal(const FundamentalDiagram& diagram);
  /// E = F (1 - alpha rho).
  static SecondMoment linear_factor(const FundamentalDiagram& diagram, double alpha);

  /// E = F on [0, lo], E = outer on [hi, 1] and the quintic Hermite blend on
  /// [lo, hi] that matches value, first and second derivative at both ends.
  static SecondMoment spline(std::string name, const FundamentalDiagram& diagram,
                             ScalarFn outer, ScalarFn outer_derivative,
                             ScalarFn outer_second_derivative, double lo, double hi);
  /// Outer piece (rho - 1)(rho - 3) / 4.
  static SecondMoment spline_e1(const FundamentalDiagram& diagram, double lo = 0.5,
                                double hi = 0.9);
  /// Outer piece lambda_w F, the lower realizability boundary near jam.
  static SecondMoment spline_e2(const FundamentalDiagram& diagram, WeightMoments weights,
                                double lo = 0.5, double hi = 0.9);

  /// Parses "equal", "linear_factor:<alpha>", "spline_e1", "spline_e2".
  static SecondMoment from_name(const std::string& spec, const FundamentalDiagram& diagram,
                                WeightMoments weights, double lo = 0.5, double hi = 0.9);

  double operator()(double rho) const { return value_(rho); }
  double derivative(double rho) const { return derivative_(rho); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  ScalarFn value_;
  ScalarFn derivative_;
};

/// Signed slacks of the realizability inequalities; all >= 0 iff the
/// equilibrium distribution is nonnegative.
struct RealizabilitySlack {
  /// E - (F - (1 - lambda_w)/(gamma - 1) (rho - F)), i.e. f_0^e >= 0.
  double lower = 0.0;
  /// E - lambda_w F, i.e. f_N^e >= 0.
  double moment = 0.0;
  /// F - E, i.e. interior f_i^e >= 0.
  double upper = 0.0;

  bool realizable(double tol = 0.0) const noexcept {
    return lower >= -tol && moment >= -tol && upper >= -tol;
  }
};

/// Grid, (F, E) closure and interior weights. Immutable once constructed.
class EquilibriumModel {
 public:
  /// Validates weights and the diagram, then checks realizability on a
  /// 1001-point density sweep. Throws std::invalid_argument for malformed
  /// weights and RealizabilityError for an unrealizable (F, E) pair.
  /// For N = 1 no weights are used and E must coincide with F.
  EquilibriumModel(VelocityGrid grid, FundamentalDiagram diagram, SecondMoment second_moment,
                   std::vector<double> weights);

  /// alpha_i = 2 i / (N (N - 1)), i = 1..N-1. Requires N >= 2.
  static std::vector<double> default_weights(std::size_t n);
  static WeightMoments weight_moments(const VelocityGrid& grid, std::span<const double> weights);

  const VelocityGrid& grid() const noexcept { return grid_; }
  const FundamentalDiagram& diagram() const noexcept { return diagram_; }
  const SecondMoment& second_moment() const noexcept { return second_moment_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double lambda_w() const noexcept { return moments_.lambda_w; }
  double gamma() const noexcept { return moments_.gamma; }
  WeightMoments weight_moments() const noexcept { return moments_; }

 private:
  VelocityGrid grid_;
  FundamentalDiagram diagram_;
  SecondMoment second_moment_;
  std::vector<double> weights_;
  WeightMoments moments_;
};

/// Equilibrium distribution f^e(rho). Components in [-1e-13, 0) are set to 0;
/// anything more negative raises RealizabilityError naming the bound.
KineticState equilibrium_f(const EquilibriumModel& model, double rho);

/// Unchecked equilibrium values and their density derivatives, written into
/// caller storage of size N + 1.
void equilibrium_components(const EquilibriumModel& model, double rho, std::span<double> values,
                            std::span<double> derivatives);

RealizabilitySlack realizability_margin(const EquilibriumModel& model, double rho);

/// Closed-form Chapman-Enskog coefficient
///   D = -(F')^2 + E' + (E - (F' - E') F - F' E) / (1 - rho).
/// Needs no realizability, so it takes the closure directly.
double stability_D_closed(const FundamentalDiagram& diagram, const SecondMoment& second_moment,
                          double rho);
double stability_D_closed(const EquilibriumModel& model, double rho);

/// The same coefficient from the discrete double sum
///   -(F')^2 + E' + 1/(1-rho) sum_i sum_{j<i} (v_i - v_j)^2 f_i^e d f_j^e / d rho.
double stability_D_general(const EquilibriumModel& model, double rho);

struct SubcharacteristicSample {
  double rho = 0.0;
  /// -F / (1 - rho), the slowest equilibrium wave speed lambda_0.
  double lower = 0.0;
  double slope = 0.0;
  bool passed = false;
};

/// Checks -F/(1-rho) <= F'(rho) <= 1 at each density.
std::vector<SubcharacteristicSample> subcharacteristic_check(const FundamentalDiagram& diagram,
                                                             std::span<const double> samples);

/// One implicit Euler step of df/dt = -(f - f^e(rho)) / tau. Density is
/// preserved bitwise under the summation order of moments().
KineticState relax_implicit(const KineticState& state, const EquilibriumModel& model, double dt,
                            double tau);

/// In-place variant used by the solver; `scratch` must hold N + 1 values.
void relax_implicit_inplace(std::span<double> f, const EquilibriumModel& model, double dt,
                            double tau, std::span<double> scratch);

}  // namespace kinetic
