#include "kinetic/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "kinetic/errors.hpp"

namespace kinetic {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("'" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("'" + key + "': cannot parse '" + text + "' as a non-negative integer");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("'" + key + "': expected true or false, got '" + text + "'");
}

std::array<double, 2> parse_pair(const std::string& key, const std::string& text) {
  std::vector<double> values;
  try {
    values = parse_list(text);
  } catch (const ConfigError& e) {
    throw ConfigError("'" + key + "': " + e.what());
  }
  if (values.size() != 2) throw ConfigError("'" + key + "': expected exactly two values");
  return {values[0], values[1]};
}

const char* boundary_name(BoundaryMode mode) {
  return mode == BoundaryMode::periodic ? "periodic" : "free";
}

const char* kind_name(InitialKind kind) {
  switch (kind) {
    case InitialKind::riemann_dirac: return "riemann_dirac";
    case InitialKind::sinusoidal: return "sinusoidal";
    case InitialKind::constant: return "constant";
    case InitialKind::custom_table: return "custom_table";
  }
  return "unknown";
}

const char* bool_name(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(parse_double("list", item));
  return out;
}

void apply_config_entry(SimConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  InitialConditionSpec& ic = c.ic;
  if (key == "name") c.name = value;
  else if (key == "n") c.velocity_count = parse_size(key, value);
  else if (key == "velocities") c.velocities = parse_list(value);
  else if (key == "cells") c.cells = parse_size(key, value);
  else if (key == "cfl") c.cfl = parse_double(key, value);
  else if (key == "tau") c.tau = parse_double(key, value);
  else if (key == "final_time") c.final_time = parse_double(key, value);
  else if (key == "boundary") {
    if (value == "periodic") c.boundary = BoundaryMode::periodic;
    else if (value == "free") c.boundary = BoundaryMode::free;
    else throw ConfigError("'boundary': expected periodic or free, got '" + value + "'");
  } else if (key == "diagram") c.model.diagram = value;
  else if (key == "second_moment") c.model.second_moment = value;
  else if (key == "weights") c.model.weights = parse_list(value);
  else if (key == "spline_breakpoints") c.model.spline_breakpoints = parse_pair(key, value);
  else if (key == "relaxation") c.relaxation = parse_bool(key, value);
  else if (key == "ic") {
    if (value == "riemann_dirac") ic.kind = InitialKind::riemann_dirac;
    else if (value == "sinusoidal") ic.kind = InitialKind::sinusoidal;
    else if (value == "constant") ic.kind = InitialKind::constant;
    else if (value == "custom_table") ic.kind = InitialKind::custom_table;
    else throw ConfigError("'ic': unknown initial condition kind '" + value + "'");
  } else if (key == "ic.rho_left") ic.rho_left = parse_double(key, value);
  else if (key == "ic.rho_right") ic.rho_right = parse_double(key, value);
  else if (key == "ic.carriers_left") ic.carriers_left = parse_pair(key, value);
  else if (key == "ic.carriers_right") ic.carriers_right = parse_pair(key, value);
  else if (key == "ic.project_infeasible") ic.project_infeasible = parse_bool(key, value);
  else if (key == "ic.base") ic.base = parse_double(key, value);
  else if (key == "ic.amplitude") ic.amplitude = parse_double(key, value);
  else if (key == "ic.wavenumber") ic.wavenumber = parse_double(key, value);
  else if (key == "ic.rho") ic.rho = parse_double(key, value);
  else if (key == "ic.at_equilibrium") ic.at_equilibrium = parse_bool(key, value);
  else if (key == "ic.f") ic.f = parse_list(value);
  else if (key == "ic.table") ic.table_path = value;
  else if (key == "snapshot_times") c.snapshot_times = parse_list(value);
  else if (key == "series_stride") c.series_stride = parse_size(key, value);
  else if (key == "reference_density") {
    if (value == "auto") c.reference_density.reset();
    else c.reference_density = parse_double(key, value);
  } else if (key == "output_dir") c.output_dir = value;
  else if (key == "threads") c.threads = static_cast<int>(parse_size(key, value));
  else throw ConfigError("unknown configuration key '" + key + "'");
}

SimConfig parse_config(std::istream& in) {
  SimConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply_config_entry(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& c) {
  const InitialConditionSpec& ic = c.ic;
  return {
      {"name", c.name},
      {"n", std::to_string(c.velocity_count)},
      {"velocities", format_list(c.velocities)},
      {"cells", std::to_string(c.cells)},
      {"cfl", format_double(c.cfl)},
      {"tau", format_double(c.tau)},
      {"final_time", format_double(c.final_time)},
      {"boundary", boundary_name(c.boundary)},
      {"diagram", c.model.diagram},
      {"second_moment", c.model.second_moment},
      {"weights", format_list(c.model.weights)},
      {"spline_breakpoints",
       format_list({c.model.spline_breakpoints[0], c.model.spline_breakpoints[1]})},
      {"relaxation", bool_name(c.relaxation)},
      {"ic", kind_name(ic.kind)},
      {"ic.rho_left", format_double(ic.rho_left)},
      {"ic.rho_right", format_double(ic.rho_right)},
      {"ic.carriers_left", format_list({ic.carriers_left[0], ic.carriers_left[1]})},
      {"ic.carriers_right", format_list({ic.carriers_right[0], ic.carriers_right[1]})},
      {"ic.project_infeasible", bool_name(ic.project_infeasible)},
      {"ic.base", format_double(ic.base)},
      {"ic.amplitude", format_double(ic.amplitude)},
      {"ic.wavenumber", format_double(ic.wavenumber)},
      {"ic.rho", format_double(ic.rho)},
      {"ic.at_equilibrium", bool_name(ic.at_equilibrium)},
      {"ic.f", format_list(ic.f)},
      {"ic.table", ic.table_path},
      {"snapshot_times", format_list(c.snapshot_times)},
      {"series_stride", std::to_string(c.series_stride)},
      {"reference_density",
       c.reference_density ? format_double(*c.reference_density) : std::string("auto")},
      {"output_dir", c.output_dir},
      {"threads", std::to_string(c.threads)},
  };
}

std::string format_config(const SimConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_entries(config)) out += key + " = " + value + "\n";
  return out;
}

void validate_config(const SimConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (c.velocity_count < 1) fail("n must be >= 1");
  if (!c.velocities.empty() && c.velocities.size() != c.velocity_count + 1) {
    fail("velocities must list n + 1 values");
  }
  if (c.cells < 2) fail("cells must be >= 2");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (!(c.tau > 0.0)) fail("tau must be positive");
  if (!(c.final_time > 0.0)) fail("final_time must be positive");
  if (c.series_stride < 1) fail("series_stride must be >= 1");
  if (c.threads < 0) fail("threads must be >= 0");
  for (double t : c.snapshot_times) {
    if (!(t >= 0.0 && t <= c.final_time)) {
      fail("snapshot time " + format_double(t) + " outside [0, final_time]");
    }
  }
  if (c.reference_density && !(*c.reference_density >= 0.0 && *c.reference_density <= 1.0)) {
    fail("reference_density must lie in [0, 1]");
  }
  const auto& bp = c.model.spline_breakpoints;
  if (!(bp[0] > 0.0 && bp[0] < bp[1] && bp[1] < 1.0)) {
    fail("spline_breakpoints must satisfy 0 < lo < hi < 1");
  }
  const InitialConditionSpec& ic = c.ic;
  switch (ic.kind) {
    case InitialKind::sinusoidal:
      if (!(ic.base - std::abs(ic.amplitude) > 0.0 && ic.base + std::abs(ic.amplitude) < 1.0)) {
        fail("sinusoidal initial data must keep base +- amplitude inside (0, 1)");
      }
      break;
    case InitialKind::riemann_dirac:
      if (!(ic.rho_left >= 0.0 && ic.rho_left < 1.0 && ic.rho_right >= 0.0 &&
            ic.rho_right < 1.0)) {
        fail("riemann_dirac densities must lie in [0, 1)");
      }
      break;
    case InitialKind::constant:
      if (ic.f.empty() && !(ic.rho >= 0.0 && ic.rho < 1.0)) fail("ic.rho must lie in [0, 1)");
      if (!ic.f.empty() && ic.f.size() != c.velocity_count + 1) {
        fail("ic.f must list n + 1 values");
      }
      break;
    case InitialKind::custom_table:
      if (ic.table_path.empty()) fail("custom_table initial data needs ic.table");
      break;
  }
  build_model(c);
}

VelocityGrid build_velocity_grid(const SimConfig& config) {
  try {
    if (config.velocities.empty()) return VelocityGrid::equidistant(config.velocity_count);
    if (config.velocities.size() != config.velocity_count + 1) {
      throw ConfigError("velocities must list n + 1 values");
    }
    return VelocityGrid(config.velocities);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("velocity grid: ") + e.what());
  }
}

EquilibriumModel build_model(const SimConfig& config) {
  VelocityGrid grid = build_velocity_grid(config);
  FundamentalDiagram diagram = FundamentalDiagram::from_name(config.model.diagram);
  try {
    std::vector<double> weights = config.model.weights;
    if (weights.empty() && grid.n() >= 2) weights = EquilibriumModel::default_weights(grid.n());
    WeightMoments moments;
    if (grid.n() >= 2 && weights.size() == grid.n() - 1) {
      moments = EquilibriumModel::weight_moments(grid, weights);
    }
    const auto& bp = config.model.spline_breakpoints;
    SecondMoment second =
        SecondMoment::from_name(config.model.second_moment, diagram, moments, bp[0], bp[1]);
    return EquilibriumModel(std::move(grid), std::move(diagram), std::move(second),
                            std::move(weights));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("equilibrium model: ") + e.what());
  } catch (const RealizabilityError& e) {
    throw ConfigError(std::string("equilibrium model: ") + e.what());
  }
}

std::vector<std::string> preset_names() {
  return {"tc1_ic1",   "tc1_ic2",    "tc1_ic3",      "tc1_ic4", "tc2_equal",
          "tc2_linear", "tc3_unstable", "tc3_equal", "tc4_e1",  "tc4_e2"};
}

SimConfig preset(const std::string& name) {
  SimConfig c;
  c.name = name;
  c.cells = 2000;
  c.cfl = 0.5;
  c.tau = 0.01;

  if (name.rfind("tc1_ic", 0) == 0) {
    c.velocity_count = 10;
    c.relaxation = false;
    c.boundary = BoundaryMode::free;
    c.final_time = 0.4;
    c.snapshot_times = {0.0, 0.4};
    c.model.diagram = "lwr";
    c.model.second_moment = "equal";
    c.ic.kind = InitialKind::riemann_dirac;
    c.ic.rho_left = 0.6;
    c.ic.rho_right = 0.8;
    if (name == "tc1_ic1") {
      c.ic.carriers_left = {0.4, 0.0};
      c.ic.carriers_right = {0.4, 0.2};
    } else if (name == "tc1_ic2") {
      c.ic.carriers_left = {0.4, 0.0};
      c.ic.carriers_right = {0.4, 0.1};
    } else if (name == "tc1_ic3") {
      c.ic.carriers_left = {0.2, 0.0};
      c.ic.carriers_right = {0.2, 0.0};
    } else if (name == "tc1_ic4") {
      c.ic.carriers_left = {0.4, 0.0};
      c.ic.carriers_right = {0.4, 0.0};
    } else {
      throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
  }

  c.boundary = BoundaryMode::periodic;
  c.relaxation = true;
  c.final_time = 20.0;
  c.snapshot_times = {0.0, 20.0};
  c.series_stride = 10;
  c.reference_density = 0.7;
  c.ic.kind = InitialKind::sinusoidal;
  c.ic.base = 0.7;
  c.ic.amplitude = 0.1;
  c.ic.wavenumber = 3.0;

  if (name == "tc2_equal" || name == "tc2_linear") {
    c.velocity_count = 2;
    c.model.diagram = "lwr";
    c.model.second_moment = name == "tc2_equal" ? "equal" : "linear_factor:0.5";
  } else if (name == "tc3_unstable" || name == "tc3_equal") {
    c.velocity_count = 20;
    c.model.diagram = "cubic";
    c.model.second_moment =
        name == "tc3_equal" ? "equal" : "linear_factor:" + format_double(1.0 / 3.0);
  } else if (name == "tc4_e1" || name == "tc4_e2") {
    c.velocity_count = 2;
    c.model.diagram = "lwr";
    c.model.second_moment = name == "tc4_e1" ? "spline_e1" : "spline_e2";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

}  // namespace kinetic
