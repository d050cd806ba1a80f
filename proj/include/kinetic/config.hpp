#pragma once

// Simulation configuration, its flat `key = value` text form and the named
// experiment presets.

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kinetic/equilibria.hpp"
#include "kinetic/godunov.hpp"
#include "kinetic/state.hpp"

namespace kinetic {

struct ModelSpec {
  std::string diagram = "lwr";
  std::string second_moment = "equal";
  /// Interior weights alpha_1..alpha_{N-1}; empty selects the defaults.
  std::vector<double> weights;
  std::array<double, 2> spline_breakpoints{0.5, 0.9};

  bool operator==(const ModelSpec&) const = default;
};

enum class InitialKind { riemann_dirac, sinusoidal, constant, custom_table };

struct InitialConditionSpec {
  InitialKind kind = InitialKind::sinusoidal;

  // riemann_dirac: two-carrier distributions left and right of x = 1/2 with
  // density rho and flux F(rho) on each side.
  double rho_left = 0.6;
  double rho_right = 0.8;
  std::array<double, 2> carriers_left{0.4, 0.0};
  std::array<double, 2> carriers_right{0.4, 0.2};
  /// Replace an infeasible flux by the nearest one the carriers can carry.
  bool project_infeasible = false;

  // sinusoidal: f_i = (base + amplitude sin(2 pi wavenumber x)) / (N + 1).
  double base = 0.7;
  double amplitude = 0.1;
  double wavenumber = 3.0;

  // constant: explicit f, or f^e(rho) / uniform rho / (N + 1).
  double rho = 0.7;
  bool at_equilibrium = true;
  std::vector<double> f;

  // custom_table: CSV with one row of N + 1 values per cell.
  std::string table_path;

  bool operator==(const InitialConditionSpec&) const = default;
};

struct SimConfig {
  std::string name = "run";
  /// Highest velocity index N.
  std::size_t velocity_count = 2;
  /// Explicit velocities; empty means v_i = i / N.
  std::vector<double> velocities;
  std::size_t cells = 2000;
  double cfl = 0.5;
  double tau = 0.01;
  double final_time = 1.0;
  BoundaryMode boundary = BoundaryMode::periodic;
  ModelSpec model;
  bool relaxation = true;
  InitialConditionSpec ic;
  /// Snapshot times in [0, final_time]; empty means {0, final_time}.
  std::vector<double> snapshot_times;
  /// Record I(t) every `series_stride` steps (and always at snapshots).
  std::size_t series_stride = 1;
  /// Reference density of I(t); defaults to the initial mean density.
  std::optional<double> reference_density;
  std::string output_dir = ".";
  /// 0 keeps the default worker count.
  int threads = 0;

  bool operator==(const SimConfig&) const = default;
};

/// Parses the flat key-value format; unknown keys and malformed values raise
/// ConfigError naming the line.
SimConfig parse_config(std::istream& in);
SimConfig load_config(const std::string& path);

/// Ordered key-value pairs that parse_config reads back to an equal config.
std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& config);
std::string format_config(const SimConfig& config);

/// Applies a single `key = value` assignment.
void apply_config_entry(SimConfig& config, const std::string& key, const std::string& value);

/// Checks ranges and cross-field constraints; throws ConfigError.
void validate_config(const SimConfig& config);

VelocityGrid build_velocity_grid(const SimConfig& config);
/// Builds and validates the equilibrium model. Realizability or weight
/// problems are reported as ConfigError.
EquilibriumModel build_model(const SimConfig& config);

/// tc1_ic1..tc1_ic4, tc2_equal, tc2_linear, tc3_unstable, tc3_equal,
/// tc4_e1, tc4_e2. Throws ConfigError for an unknown name.
SimConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Number formatting shared by config echo and CSV output: shortest form at
/// 17 significant digits, which round-trips exactly.
std::string format_double(double value);
std::string format_list(const std::vector<double>& values);
std::vector<double> parse_list(const std::string& text);

}  // namespace kinetic
