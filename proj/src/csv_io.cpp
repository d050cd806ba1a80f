#include "kinetic/csv_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinetic/errors.hpp"

#ifndef KINETIC_VERSION
#define KINETIC_VERSION "unknown"
#endif

namespace kinetic {

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string snapshot_tag(const SimConfig& config, std::size_t k) {
  return config.name + "_snapshot_" + std::to_string(k) + ".csv";
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw IoError("no column '" + name + "'");
}

std::string CsvTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return {};
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        table.metadata.emplace_back(body, "");
      } else {
        table.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      }
      continue;
    }
    std::stringstream fields(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(fields, cell, ',')) table.columns.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    try {
      row = parse_list(line);
    } catch (const ConfigError&) {
      throw IoError("'" + path + "' line " + std::to_string(line_no) + ": malformed number");
    }
    if (row.size() != table.columns.size()) {
      throw IoError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                    std::to_string(table.columns.size()) + " fields");
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw IoError("'" + path + "' has no header row");
  return table;
}

void write_snapshot_csv(const FieldSnapshot& snapshot, const std::string& path,
                        const Metadata& metadata) {
  std::ofstream out = open_for_write(path);
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  out << "# time=" << format_double(snapshot.time) << '\n';
  out << "x,rho,q";
  for (std::size_t i = 0; i < snapshot.f.components(); ++i) out << ",f" << i;
  out << '\n';
  const std::vector<double> rho = snapshot.rho();
  const std::vector<double> q = snapshot.q();
  for (std::size_t j = 0; j < snapshot.f.cells(); ++j) {
    out << format_double(snapshot.x[j]) << ',' << format_double(rho[j]) << ','
        << format_double(q[j]);
    for (double v : snapshot.f[j]) out << ',' << format_double(v);
    out << '\n';
  }
  finish(out, path);
}

void write_series_csv(const PersistenceSeries& series, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "t,I\n";
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    out << format_double(series.t[k]) << ',' << format_double(series.I[k]) << '\n';
  }
  finish(out, path);
}

void write_reference_csv(const LwrRiemann& wave, const SpatialGrid& space, double t,
                         const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "# time=" << format_double(t) << '\n';
  out << "# speed_left=" << format_double(wave.speed_left) << '\n';
  out << "# speed_right=" << format_double(wave.speed_right) << '\n';
  out << "x,rho\n";
  const std::vector<double> rho = sample_reference(wave, space, t);
  for (std::size_t j = 0; j < space.cells(); ++j) {
    out << format_double(space.center(j)) << ',' << format_double(rho[j]) << '\n';
  }
  finish(out, path);
}

std::string version_string() { return KINETIC_VERSION; }

Metadata run_metadata(const SimConfig& config, const RunMetadata& run) {
  Metadata meta{
      {"version", version_string()},
      {"steps", std::to_string(run.steps)},
      {"final_time", format_double(run.final_time)},
      {"mass_initial", format_double(run.mass_initial)},
      {"mass_final", format_double(run.mass_final)},
      {"max_mass_drift", format_double(run.max_mass_drift)},
      {"reference_density", format_double(run.reference_density)},
  };
  for (const auto& [key, value] : config_entries(config)) meta.emplace_back("config." + key, value);
  return meta;
}

std::vector<std::string> write_run_outputs(const SimConfig& config, const RunResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create '" + config.output_dir + "': " + ec.message());
  const std::filesystem::path dir(config.output_dir);

  std::vector<std::string> written;
  const Metadata meta = run_metadata(config, result.metadata);
  for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
    const std::string path = (dir / snapshot_tag(config, k)).string();
    write_snapshot_csv(result.snapshots[k], path, meta);
    written.push_back(path);
  }
  const std::string series = (dir / (config.name + "_series.csv")).string();
  write_series_csv(result.series, series);
  written.push_back(series);

  if (config.ic.kind == InitialKind::riemann_dirac) {
    try {
      const LwrRiemann wave = lwr_riemann_reference(
          config.ic.rho_left, config.ic.rho_right, FundamentalDiagram::from_name(config.model.diagram));
      const std::string path = (dir / (config.name + "_lwr.csv")).string();
      write_reference_csv(wave, SpatialGrid(config.cells, config.boundary),
                          result.metadata.final_time, path);
      written.push_back(path);
    } catch (const ConfigError&) {
      // No reference for non-concave diagrams.
    }
  }
  return written;
}

}  // namespace kinetic
