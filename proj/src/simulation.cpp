#include "kinetic/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kinetic/csv_io.hpp"
#include "kinetic/errors.hpp"

namespace kinetic {

namespace {

std::size_t carrier_index(double carrier, const VelocityGrid& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - carrier) <= 1e-12) return i;
  }
  std::ostringstream msg;
  msg << "riemann_dirac: carrier velocity " << carrier << " is not a grid velocity";
  throw ConfigError(msg.str());
}

std::vector<double> dirac_state(double rho, std::array<double, 2> carriers,
                                const FundamentalDiagram& diagram, const VelocityGrid& grid,
                                bool project, const char* side) {
  const std::size_t i1 = carrier_index(carriers[0], grid);
  const std::size_t i2 = carrier_index(carriers[1], grid);
  const double c1 = grid[i1];
  const double c2 = grid[i2];
  double q = diagram(rho);
  if (project) q = std::clamp(q, std::min(c1, c2) * rho, std::max(c1, c2) * rho);

  // alpha c1 + beta c2 = q, alpha + beta = rho.
  double alpha = rho;
  double beta = 0.0;
  if (i1 != i2) {
    alpha = (q - c2 * rho) / (c1 - c2);
    beta = rho - alpha;
  } else if (std::abs(c1 * rho - q) > 1e-14) {
    alpha = beta = std::nan("");
  }
  if (alpha < 0.0 && alpha >= -1e-14) alpha = 0.0;
  if (beta < 0.0 && beta >= -1e-14) beta = 0.0;
  if (!(alpha >= 0.0 && beta >= 0.0)) {
    std::ostringstream msg;
    msg << "riemann_dirac: " << side << " state rho = " << rho << ", q = " << q
        << " is not carried by velocities (" << c1 << ", " << c2 << "): alpha = " << alpha
        << ", beta = " << beta;
    throw ConfigError(msg.str());
  }
  std::vector<double> f(grid.size(), 0.0);
  f[i1] += alpha;
  f[i2] += beta;
  return f;
}

CellField read_table(const std::string& path, const VelocityGrid& grid,
                     const SpatialGrid& space) {
  CsvTable table;
  try {
    table = read_csv(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  if (table.rows.size() != space.cells()) {
    throw ConfigError("custom_table '" + path + "': expected " +
                      std::to_string(space.cells()) + " rows");
  }
  CellField field(space.cells(), grid.size());
  for (std::size_t j = 0; j < space.cells(); ++j) {
    const auto& row = table.rows[j];
    if (row.size() != grid.size()) {
      throw ConfigError("custom_table '" + path + "': row " + std::to_string(j) + " needs " +
                        std::to_string(grid.size()) + " values");
    }
    std::ranges::copy(row, field[j].begin());
  }
  return field;
}

FieldSnapshot take_snapshot(double t, const VelocityGrid& grid, const SpatialGrid& space,
                            const CellField& f) {
  FieldSnapshot snap{t, grid, {}, f};
  snap.x.resize(space.cells());
  for (std::size_t j = 0; j < space.cells(); ++j) snap.x[j] = space.center(j);
  return snap;
}

double field_mass(const CellField& f) {
  double total = 0.0;
  for (std::size_t j = 0; j < f.cells(); ++j) {
    double rho = 0.0;
    for (double v : f[j]) rho += v;
    total += rho;
  }
  return total / static_cast<double>(f.cells());
}

void check_field(const CellField& f, double tol, std::size_t step, double t) {
  for (std::size_t j = 0; j < f.cells(); ++j) {
    const SimplexCheck check = validate_simplex(f[j], tol);
    if (!check) {
      std::ostringstream msg;
      msg << "step " << step << " (t = " << t << "): cell " << j << " left the simplex: "
          << check.message;
      throw InvariantViolation(msg.str(), j);
    }
  }
}

[[noreturn]] void rethrow_at_step(std::size_t step, double t) {
  std::ostringstream prefix;
  prefix << "step " << step << " (t = " << t << "): ";
  try {
    throw;
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(prefix.str() + e.what(), e.cell());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix.str() + e.what());
  }
}

}  // namespace

std::vector<double> FieldSnapshot::rho() const {
  std::vector<double> out(f.cells());
  for (std::size_t j = 0; j < f.cells(); ++j) {
    double s = 0.0;
    for (double v : f[j]) s += v;
    out[j] = s;
  }
  return out;
}

std::vector<double> FieldSnapshot::q() const {
  std::vector<double> out(f.cells());
  for (std::size_t j = 0; j < f.cells(); ++j) {
    const auto row = f[j];
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) s += grid[i] * row[i];
    out[j] = s;
  }
  return out;
}

double FieldSnapshot::mass() const { return field_mass(f); }

double persistence_I(std::span<const double> rho, double rho_ref) {
  if (rho.empty()) return 0.0;
  double total = 0.0;
  for (double r : rho) total += std::abs(r - rho_ref);
  return total / static_cast<double>(rho.size());
}

double persistence_I(const FieldSnapshot& snapshot, double rho_ref) {
  return persistence_I(snapshot.rho(), rho_ref);
}

CellField ic_riemann_dirac(double rho_left, double rho_right, std::array<double, 2> carriers_left,
                           std::array<double, 2> carriers_right,
                           const FundamentalDiagram& diagram, const VelocityGrid& grid,
                           const SpatialGrid& space, bool project_infeasible) {
  const auto left = dirac_state(rho_left, carriers_left, diagram, grid, project_infeasible, "left");
  const auto right =
      dirac_state(rho_right, carriers_right, diagram, grid, project_infeasible, "right");
  CellField field(space.cells(), grid.size());
  for (std::size_t j = 0; j < space.cells(); ++j) {
    std::ranges::copy(space.center(j) <= 0.5 ? left : right, field[j].begin());
  }
  return field;
}

CellField ic_sinusoidal(double base, double amplitude, double wavenumber,
                        const VelocityGrid& grid, const SpatialGrid& space) {
  if (!(base - std::abs(amplitude) > 0.0 && base + std::abs(amplitude) < 1.0)) {
    throw ConfigError("sinusoidal: base +- amplitude must stay inside (0, 1)");
  }
  const double share = 1.0 / static_cast<double>(grid.size());
  CellField field(space.cells(), grid.size());
  for (std::size_t j = 0; j < space.cells(); ++j) {
    const double rho =
        base + amplitude * std::sin(2.0 * std::numbers::pi * wavenumber * space.center(j));
    std::ranges::fill(field[j], rho * share);
  }
  return field;
}

CellField build_initial_field(const SimConfig& config, const EquilibriumModel& model,
                              const SpatialGrid& space) {
  const VelocityGrid& grid = model.grid();
  const InitialConditionSpec& ic = config.ic;
  CellField field;
  switch (ic.kind) {
    case InitialKind::riemann_dirac:
      field = ic_riemann_dirac(ic.rho_left, ic.rho_right, ic.carriers_left, ic.carriers_right,
                               model.diagram(), grid, space, ic.project_infeasible);
      break;
    case InitialKind::sinusoidal:
      field = ic_sinusoidal(ic.base, ic.amplitude, ic.wavenumber, grid, space);
      break;
    case InitialKind::constant: {
      std::vector<double> f = ic.f;
      if (f.empty()) {
        if (ic.at_equilibrium) {
          f = equilibrium_f(model, ic.rho).f;
        } else {
          f.assign(grid.size(), ic.rho / static_cast<double>(grid.size()));
        }
      }
      if (f.size() != grid.size()) throw ConfigError("constant: ic.f must list n + 1 values");
      field = CellField(space.cells(), grid.size());
      for (std::size_t j = 0; j < space.cells(); ++j) std::ranges::copy(f, field[j].begin());
      break;
    }
    case InitialKind::custom_table:
      field = read_table(ic.table_path, grid, space);
      break;
  }
  for (std::size_t j = 0; j < field.cells(); ++j) {
    const SimplexCheck check = validate_simplex(field[j], 0.0);
    if (!check) {
      throw ConfigError("initial data: cell " + std::to_string(j) + ": " + check.message);
    }
    if (!(check.rho < 1.0)) {
      throw ConfigError("initial data: cell " + std::to_string(j) + " is at jam density");
    }
  }
  return field;
}

RunResult run(const SimConfig& config, const StepObserver& observer) {
  validate_config(config);
  const EquilibriumModel model = build_model(config);
  const SpatialGrid space(config.cells, config.boundary);
  return run(config, build_initial_field(config, model, space), observer);
}

RunResult run(const SimConfig& config, const CellField& initial, const StepObserver& observer) {
  validate_config(config);
  const EquilibriumModel model = build_model(config);
  const VelocityGrid& grid = model.grid();
  const SpatialGrid space(config.cells, config.boundary);
  if (initial.cells() != space.cells() || initial.components() != grid.size()) {
    throw ConfigError("initial field shape does not match cells x (n + 1)");
  }
  if (config.threads > 0) set_worker_count(config.threads);

  std::vector<double> targets = config.snapshot_times;
  if (targets.empty()) targets = {0.0, config.final_time};
  std::ranges::sort(targets);
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  if (targets.back() != config.final_time) targets.push_back(config.final_time);
  // Steps stop at every snapshot time and at T; only requested ones are saved.
  const auto requested = [&](double t) {
    return std::ranges::find(config.snapshot_times, t) != config.snapshot_times.end() ||
           (config.snapshot_times.empty() && (t == 0.0 || t == config.final_time));
  };

  CellField f = initial;
  const std::size_t m = grid.size();
  CellField n(space.cells(), m);
  try {
    for (std::size_t j = 0; j < space.cells(); ++j) kernels::f_to_n(f[j], n[j]);
  } catch (const NumericalError&) {
    rethrow_at_step(0, 0.0);
  }

  RunResult result;
  RunMetadata& meta = result.metadata;
  meta.mass_initial = field_mass(f);
  meta.reference_density = config.reference_density.value_or(meta.mass_initial);

  std::size_t step = 0;
  double t = 0.0;
  auto record = [&](bool snapshot) {
    const FieldSnapshot snap = take_snapshot(t, grid, space, f);
    const double mass = snap.mass();
    meta.max_mass_drift = std::max(meta.max_mass_drift, std::abs(mass - meta.mass_initial));
    result.series.t.push_back(t);
    result.series.I.push_back(persistence_I(snap, meta.reference_density));
    if (snapshot) {
      check_field(f, 1e-10, step, t);
      result.snapshots.push_back(snap);
    }
  };
  record(requested(0.0));

  AdvectionStepper stepper(grid, space);
  std::vector<double> scratch(2 * m);
  std::size_t next = targets.front() == 0.0 ? 1 : 0;
  while (next < targets.size()) {
    const double target = targets[next];
    bool hit = false;
    double dt = 0.0;
    try {
      dt = cfl_dt(n, grid, space, config.cfl);
      if (t + dt >= target) {
        dt = target - t;
        hit = true;
      }
      stepper.step(n, dt);
      for (std::size_t j = 0; j < space.cells(); ++j) {
        kernels::n_to_f(n[j], f[j]);
        if (config.relaxation) {
          relax_implicit_inplace(f[j], model, dt, config.tau, scratch);
          kernels::f_to_n(f[j], n[j]);
        }
      }
    } catch (const NumericalError&) {
      rethrow_at_step(step + 1, t);
    }
    ++step;
    if (hit) {
      t = target;
      ++next;
    } else {
      t += dt;
    }
    if (observer) observer(step, t);
    if (hit || step % config.series_stride == 0) record(hit && requested(t));
  }
  meta.steps = step;
  meta.final_time = t;
  meta.mass_final = field_mass(f);
  return result;
}

}  // namespace kinetic
