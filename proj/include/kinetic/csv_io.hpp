#pragma once

// CSV output of snapshots and I(t) series, plus a reader for the same format.
//
// Snapshot files start with `# key=value` metadata lines, then the header
// `x,rho,q,f0,...,fN` and one row per cell. Series files have the header
// `t,I`. Numbers are written with 17 significant digits.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kinetic/config.hpp"
#include "kinetic/reference.hpp"
#include "kinetic/simulation.hpp"

namespace kinetic {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct CsvTable {
  Metadata metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws IoError when absent.
  std::size_t column(const std::string& name) const;
  /// Value of a metadata key, or empty when absent.
  std::string meta(const std::string& key) const;
};

/// Reads a file in the format written here. Throws IoError naming the path
/// and line on failure.
CsvTable read_csv(const std::string& path);

void write_snapshot_csv(const FieldSnapshot& snapshot, const std::string& path,
                        const Metadata& metadata = {});
void write_series_csv(const PersistenceSeries& series, const std::string& path);
/// Columns x,rho of the reference density at time t.
void write_reference_csv(const LwrRiemann& wave, const SpatialGrid& space, double t,
                         const std::string& path);

/// Build version from `git describe`, fixed at configure time.
std::string version_string();

/// Run metadata and the config echo (`config.<key>`).
Metadata run_metadata(const SimConfig& config, const RunMetadata& run);

/// Writes `<name>_snapshot_<k>.csv` per snapshot and `<name>_series.csv`
/// into config.output_dir (plus `<name>_lwr.csv` for Riemann data under a
/// concave diagram). Returns the paths written.
std::vector<std::string> write_run_outputs(const SimConfig& config, const RunResult& result);

}  // namespace kinetic
