// kintraffic: command-line driver for the discrete-velocity traffic solver.
//
//   kintraffic run --config sim.cfg
//   kintraffic preset tc2_equal --out results/
//   kintraffic stability --model tc4_e1 --samples 99
//   kintraffic exact-riemann --left 0.2,0.375,0.2 --right 0.5,0.1,0.3 --time 0.2
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 1 I/O or anything else.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kinetic/config.hpp"
#include "kinetic/csv_io.hpp"
#include "kinetic/equilibria.hpp"
#include "kinetic/errors.hpp"
#include "kinetic/godunov.hpp"
#include "kinetic/simulation.hpp"

using namespace kinetic;

namespace {

int run_and_write(const SimConfig& config) {
  const RunResult result = run(config);
  for (const std::string& path : write_run_outputs(config, result)) {
    std::cout << path << '\n';
  }
  std::cerr << config.name << ": " << result.metadata.steps << " steps, mass drift "
            << result.metadata.max_mass_drift << '\n';
  return 0;
}

// A preset name, a config file, or inline `key=value` pairs separated by ';'.
SimConfig resolve_model(const std::string& spec) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return preset(spec);
  if (std::filesystem::is_regular_file(spec)) return load_config(spec);
  SimConfig config;
  std::stringstream items(spec);
  std::string item;
  while (std::getline(items, item, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--model: '" + spec + "' is neither a preset, a file nor key=value pairs");
    }
    apply_config_entry(config, item.substr(0, eq), item.substr(eq + 1));
  }
  return config;
}

int stability_table(const std::string& spec, int samples) {
  if (samples < 1) throw ConfigError("--samples must be >= 1");
  const SimConfig config = resolve_model(spec);
  const EquilibriumModel model = build_model(config);
  const FundamentalDiagram& F = model.diagram();
  const SecondMoment& E = model.second_moment();

  std::cout << "# diagram=" << F.name() << '\n';
  std::cout << "# second_moment=" << E.name() << '\n';
  std::cout << "# n=" << model.grid().n() << '\n';
  std::cout << "rho,F,dF,E,dE,D_closed,D_general,slack_lower,slack_moment,slack_upper,"
               "subcharacteristic\n";
  std::vector<double> rhos;
  for (int k = 1; k <= samples; ++k) rhos.push_back(static_cast<double>(k) / (samples + 1));
  const auto sub = subcharacteristic_check(F, rhos);
  for (std::size_t k = 0; k < rhos.size(); ++k) {
    const double rho = rhos[k];
    const RealizabilitySlack slack = realizability_margin(model, rho);
    std::cout << format_double(rho) << ',' << format_double(F(rho)) << ','
              << format_double(F.derivative(rho)) << ',' << format_double(E(rho)) << ','
              << format_double(E.derivative(rho)) << ','
              << format_double(stability_D_closed(model, rho)) << ','
              << format_double(stability_D_general(model, rho)) << ','
              << format_double(slack.lower) << ',' << format_double(slack.moment) << ','
              << format_double(slack.upper) << ',' << (sub[k].passed ? 1 : 0) << '\n';
  }
  return 0;
}

int exact_riemann(const std::string& left_text, const std::string& right_text, double time,
                  int n, const std::string& velocities_text, int cells) {
  const DiagonalState left{parse_list(left_text)};
  const DiagonalState right{parse_list(right_text)};
  if (left.w.size() < 2 || left.w.size() != right.w.size()) {
    throw ConfigError("--left and --right need the same number (>= 2) of components");
  }
  VelocityGrid grid = VelocityGrid::equidistant(left.w.size() - 1);
  try {
    if (!velocities_text.empty()) {
      grid = VelocityGrid(parse_list(velocities_text));
    } else if (n > 0) {
      grid = VelocityGrid::equidistant(static_cast<std::size_t>(n));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (grid.size() != left.w.size()) throw ConfigError("state length does not match N + 1");
  if (!(time > 0.0)) throw ConfigError("--time must be positive");
  for (const auto* s : {&left, &right}) {
    for (double w : s->w) {
      if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("diagonal components must lie in [0, 1]");
    }
  }

  const RiemannFan fan = riemann_fan(left, right, grid);
  const SpatialGrid space(static_cast<std::size_t>(cells), BoundaryMode::free);
  std::cout << "# time=" << format_double(time) << '\n';
  std::cout << "# speeds=" << format_list(fan.speeds) << '\n';
  std::cout << "# selected=" << fan.selected << '\n';
  std::cout << "x,rho,q";
  for (std::size_t i = 0; i < grid.size(); ++i) std::cout << ",f" << i;
  std::cout << '\n';
  for (std::size_t j = 0; j < space.cells(); ++j) {
    const double x = space.center(j);
    const KineticState f = w_to_f(exact_riemann_sample(fan, (x - 0.5) / time));
    const MacroMoments mom = moments(f, grid);
    std::cout << format_double(x) << ',' << format_double(mom.rho) << ',' << format_double(mom.q);
    for (double v : f.f) std::cout << ',' << format_double(v);
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-velocity kinetic traffic solver"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a simulation from a config file");
  run_cmd->add_option("--config", config_path, "key = value config file")->required();
  run_cmd->add_option("--threads", threads, "Worker threads for the flux loop");

  std::string preset_name;
  std::string out_dir;
  std::size_t cells = 0;
  double final_time = 0.0;
  bool project = false;
  auto* preset_cmd = app.add_subcommand("preset", "Run a named experiment preset");
  preset_cmd->add_option("name", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(preset_names()));
  preset_cmd->add_option("--out", out_dir, "Output directory")->required();
  preset_cmd->add_option("--cells", cells, "Override the cell count");
  preset_cmd->add_option("--final-time", final_time, "Override T (snapshots clipped to T)");
  preset_cmd->add_flag("--project-infeasible", project,
                       "Clip infeasible Riemann-Dirac fluxes instead of failing");
  preset_cmd->add_option("--threads", threads, "Worker threads for the flux loop");

  std::string model_spec;
  int samples = 99;
  auto* stab_cmd = app.add_subcommand("stability", "Tabulate D(rho) and realizability slacks");
  stab_cmd->add_option("--model", model_spec, "Preset, config file or key=value;... pairs")
      ->required();
  stab_cmd->add_option("--samples", samples, "Interior density samples");

  std::string left_text;
  std::string right_text;
  double time = 0.0;
  int n = 0;
  std::string velocities_text;
  int sample_cells = 400;
  auto* riemann_cmd = app.add_subcommand("exact-riemann", "Sample the exact Riemann solution");
  riemann_cmd->add_option("--left", left_text, "Left diagonal state w_0,...,w_N")->required();
  riemann_cmd->add_option("--right", right_text, "Right diagonal state")->required();
  riemann_cmd->add_option("--time", time, "Sampling time")->required();
  riemann_cmd->add_option("--n", n, "Equidistant grid with N + 1 velocities");
  riemann_cmd->add_option("--velocities", velocities_text, "Explicit velocity list");
  riemann_cmd->add_option("--cells", sample_cells, "Sample points on [0, 1]")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run_cmd) {
      SimConfig config = load_config(config_path);
      if (threads > 0) config.threads = threads;
      return run_and_write(config);
    }
    if (*preset_cmd) {
      SimConfig config = preset(preset_name);
      config.output_dir = out_dir;
      if (cells > 0) config.cells = cells;
      if (final_time > 0.0) {
        config.final_time = final_time;
        std::erase_if(config.snapshot_times, [&](double t) { return t > final_time; });
        config.snapshot_times.push_back(final_time);
      }
      if (project) config.ic.project_infeasible = true;
      if (threads > 0) config.threads = threads;
      return run_and_write(config);
    }
    if (*stab_cmd) return stability_table(model_spec, samples);
    if (*riemann_cmd) {
      return exact_riemann(left_text, right_text, time, n, velocities_text, sample_cells);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
