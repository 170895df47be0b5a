#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vortex/array_field.hpp"
#include "vortex/polarization.hpp"
#include "vortex/topology.hpp"

namespace vortex {

enum class OutputKind { flux, p_z, p_zz, all_params, components };

std::string_view to_string(OutputKind k);

/// Everything needed to reproduce a scan. Lengths are stored in meters.
struct ScanConfig {
  ArrayConfig array{};
  std::vector<double> z_list;  // m; empty means {1, 1.5, 2} z_R
  double half_width = 3e-3;    // m
  int resolution = 64;         // nodes per axis
  Evaluator evaluator = Evaluator::farfield;
  std::optional<TruncationPolicy> truncation;  // nullopt: default per point
  std::vector<OutputKind> outputs{OutputKind::flux, OutputKind::p_z, OutputKind::p_zz};

  double rayleigh_range() const { return vortex::rayleigh_range(array); }
  /// z_list, or {1, 1.5, 2} z_R when it is empty.
  std::vector<double> planes() const;
  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

/// Parses the JSON configuration text. `origin` labels diagnostics.
/// Fills defaults (lambda = 1 um, R = 1 mm, z = {1, 1.5, 2} z_R), rejects
/// unknown keys. A CSV written by write_csv is accepted too: its metadata
/// echo line is parsed instead.
ScanConfig parse_config(const std::string& text, const std::string& origin = "config");
ScanConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo; parse_config(config_to_json(c)) reproduces c exactly.
std::string config_to_json(const ScanConfig& config);

enum class CellStatus { defined = 1, undefined = 0, failed = -1 };

struct FieldCell {
  double x = 0.0;  // m
  double y = 0.0;  // m
  CellStatus status = CellStatus::defined;
  double flux = 0.0;
  FieldAmplitudes amplitudes{};
  PolarizationState polarization{};
  std::string error;  // evaluator message for failed cells
};

struct FieldMap {
  ScanConfig config;
  double z = 0.0;
  std::string layout;  // "grid" or "profile"
  int points_per_axis = 0;
  std::string timestamp;  // empty: not recorded
  std::vector<FieldCell> cells;  // row-major (y outer, x inner) for grids
};

/// Evaluates one point: amplitudes, flux of E = -i A (omega = 1 a.u.) and
/// polarization. Evaluator failures are recorded in the cell.
FieldCell evaluate_cell(const ScanConfig& config, double x, double y, double z);

/// One map per z in config.z_list. Identical configs give identical maps
/// regardless of thread count.
std::vector<FieldMap> field_map(const ScanConfig& config, int threads = 0);

struct RadialSampling {
  double rho_max = 0.0;  // m
  int points = 2;        // >= 1; a single point sits at rho = 0
};

/// 1-D cut at fixed azimuth, one table per z. Defaults: rho_max = half_width,
/// points = resolution.
std::vector<FieldMap> radial_profile(const ScanConfig& config, double azimuth,
                                     std::optional<RadialSampling> sampling = std::nullopt,
                                     int threads = 0);

/// CSV with a '#'-prefixed key = value header and the fixed column set.
void write_csv(std::ostream& out, const FieldMap& map);
std::string to_csv(const FieldMap& map);

struct ScanSingularities {
  double z;
  Component component;
  std::vector<SingularityRecord> records;
};

/// singularity_scan over the config grid for every z and all three components.
std::vector<ScanSingularities> scan_singularities(const ScanConfig& config, int threads = 0);
void write_singularities_csv(std::ostream& out, const ScanConfig& config,
                             const std::vector<ScanSingularities>& found);

/// PNG heatmaps for the requested outputs; returns the written files.
/// Empty when the build has no PNG support.
std::vector<std::filesystem::path> write_heatmaps(const FieldMap& map,
                                                  const std::filesystem::path& dir,
                                                  const std::string& stem);
bool heatmaps_supported();

}  // namespace vortex
