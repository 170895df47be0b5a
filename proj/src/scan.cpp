#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/parallel.hpp"
#include "vortex/scan.hpp"

namespace vortex {
namespace {

// 17 significant digits, fixed layout so equal doubles give equal bytes.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

constexpr const char* kColumns =
    "rho_x_m,rho_y_m,flux_au,re_a_plus,im_a_plus,re_a_zero,im_a_zero,re_a_minus,im_a_minus,"
    "p_x,p_y,p_z,p_xy,p_xz,p_yz,p_xx_minus_yy,p_zz,defined_flag";

void write_row(std::ostream& out, const FieldCell& c) {
  out << num(c.x) << ',' << num(c.y);
  if (c.status == CellStatus::failed) {
    for (int i = 0; i < 15; ++i) out << ",undefined";
    out << ",-1\n";
    return;
  }
  out << ',' << num(c.flux);
  for (int q = 0; q < 3; ++q) {
    out << ',' << num(c.amplitudes[q].real()) << ',' << num(c.amplitudes[q].imag());
  }
  if (c.status == CellStatus::undefined) {
    for (int i = 0; i < 8; ++i) out << ",undefined";
    out << ",0\n";
    return;
  }
  const PolarizationState& p = c.polarization;
  for (double v : {p.p_x, p.p_y, p.p_z, p.p_xy, p.p_xz, p.p_yz, p.p_xx_minus_yy, p.p_zz}) {
    out << ',' << num(v);
  }
  out << ",1\n";
}

std::vector<FieldCell> evaluate_points(const ScanConfig& config, const std::vector<std::pair<double, double>>& xy,
                                       double z, int threads) {
  std::vector<FieldCell> cells(xy.size());
  parallel_for(xy.size(), threads, [&](std::size_t i) {
    cells[i] = evaluate_cell(config, xy[i].first, xy[i].second, z);
  });
  return cells;
}

}  // namespace

FieldCell evaluate_cell(const ScanConfig& config, double x, double y, double z) {
  FieldCell cell;
  cell.x = x;
  cell.y = y;
  try {
    const ObservationPoint point = ObservationPoint::from_cartesian(x, y, z);
    cell.amplitudes = evaluate(config.evaluator, config.array, point, config.truncation);
    const ConeGeometry g = cone_geometry(config.array, z);
    cell.flux = flux_density(electric_field(cell.amplitudes, 1.0), g.theta_k);
    if (auto p = try_polarization_params(cell.amplitudes)) {
      cell.polarization = *p;
      cell.status = CellStatus::defined;
    } else {
      cell.status = CellStatus::undefined;
    }
  } catch (const std::exception& e) {
    cell.status = CellStatus::failed;
    cell.amplitudes = {};
    cell.flux = 0.0;
    cell.error = e.what();
  }
  return cell;
}

std::vector<FieldMap> field_map(const ScanConfig& config, int threads) {
  config.validate();
  const int n = config.resolution;
  const double step = 2.0 * config.half_width / (n - 1);
  std::vector<std::pair<double, double>> xy;
  if (!config.outputs.empty()) {
    xy.reserve(std::size_t(n) * std::size_t(n));
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) xy.emplace_back(-config.half_width + i * step, -config.half_width + j * step);
    }
  }
  std::vector<FieldMap> maps;
  for (double z : config.planes()) {
    FieldMap m;
    m.config = config;
    m.z = z;
    m.layout = "grid";
    m.points_per_axis = n;
    m.cells = evaluate_points(config, xy, z, threads);
    maps.push_back(std::move(m));
  }
  return maps;
}

std::vector<FieldMap> radial_profile(const ScanConfig& config, double azimuth,
                                     std::optional<RadialSampling> sampling, int threads) {
  config.validate();
  const RadialSampling s = sampling.value_or(RadialSampling{config.half_width, config.resolution});
  if (s.points < 1) throw ConfigError("profile.points", "need at least one point");
  if (s.points > 1 && !(s.rho_max > 0.0)) throw ConfigError("profile.rho_max", "must be > 0");
  if (!std::isfinite(azimuth)) throw ConfigError("profile.azimuth", "must be finite");
  std::vector<std::pair<double, double>> xy;
  const double c = std::cos(azimuth);
  const double sn = std::sin(azimuth);
  for (int i = 0; i < s.points; ++i) {
    const double rho = s.points == 1 ? 0.0 : s.rho_max * i / (s.points - 1);
    xy.emplace_back(rho * c, rho * sn);
  }
  std::vector<FieldMap> maps;
  for (double z : config.planes()) {
    FieldMap m;
    m.config = config;
    m.z = z;
    m.layout = "profile";
    m.points_per_axis = s.points;
    m.cells = evaluate_points(config, xy, z, threads);
    maps.push_back(std::move(m));
  }
  return maps;
}

void write_csv(std::ostream& out, const FieldMap& map) {
  const ScanConfig& c = map.config;
  out << "# format = vortex-field-csv 1\n";
  out << "# layout = " << map.layout << '\n';
  out << "# evaluator = " << to_string(c.evaluator) << '\n';
  out << "# N = " << c.array.n_emitters << '\n';
  out << "# l = " << c.array.phase_param << '\n';
  out << "# m_z = " << c.array.m_z << '\n';
  out << "# R_m = " << num(c.array.radius) << '\n';
  out << "# lambda_m = " << num(c.array.wavelength) << '\n';
  out << "# z_R_m = " << num(c.rayleigh_range()) << '\n';
  out << "# z_m = " << num(map.z) << '\n';
  out << "# z_over_z_R = " << num(map.z / c.rayleigh_range()) << '\n';
  out << "# points_per_axis = " << map.points_per_axis << '\n';
  out << "# cells = " << map.cells.size() << '\n';
  out << "# flux_units = arbitrary (omega = 1)\n";
  out << "# timestamp = " << (map.timestamp.empty() ? "none" : map.timestamp) << '\n';
  out << "# config = " << config_to_json(c) << '\n';
  out << kColumns << '\n';
  for (const FieldCell& cell : map.cells) write_row(out, cell);
}

std::string to_csv(const FieldMap& map) {
  std::ostringstream out;
  write_csv(out, map);
  return out.str();
}

std::vector<ScanSingularities> scan_singularities(const ScanConfig& config, int threads) {
  config.validate();
  const FieldSampler sampler = make_sampler(config.evaluator, config.array, config.truncation);
  std::vector<ScanSingularities> out;
  for (double z : config.planes()) {
    GridSpec grid;
    grid.half_width = config.half_width;
    grid.resolution = config.resolution;
    grid.z = z;
    for (Component comp : {Component::plus, Component::zero, Component::minus}) {
      out.push_back({z, comp, singularity_scan(sampler, grid, comp, threads)});
    }
  }
  return out;
}

void write_singularities_csv(std::ostream& out, const ScanConfig& config,
                             const std::vector<ScanSingularities>& found) {
  out << "# format = vortex-singularities-csv 1\n";
  out << "# evaluator = " << to_string(config.evaluator) << '\n';
  out << "# z_R_m = " << num(config.rayleigh_range()) << '\n';
  out << "# timestamp = none\n";
  out << "# config = " << config_to_json(config) << '\n';
  out << "z_m,component,kind,x_m,y_m,winding\n";
  for (const auto& f : found) {
    for (const auto& r : f.records) {
      out << num(f.z) << ',' << to_string(f.component) << ',' << to_string(r.kind) << ','
          << num(r.x) << ',' << num(r.y) << ',' << r.winding << '\n';
    }
  }
}

}  // namespace vortex
