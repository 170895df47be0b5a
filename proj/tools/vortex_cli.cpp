// Command-line front end: grid scans, radial cuts, singularity search,
// atom-count thresholds and the acceptance suite.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vortex/errors.hpp"
#include "vortex/scan.hpp"
#include "vortex/topology.hpp"
#include "vortex/verify.hpp"

namespace fs = std::filesystem;
using namespace vortex;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::string evaluator;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON configuration file (defaults apply when omitted)");
  cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--evaluator", c.evaluator, "exact, farfield, series or continuous (overrides the config)");
  cmd->add_option("--threads", c.threads, "worker threads, 0 = hardware (capped by VORTEX_MAX_THREADS)");
}

ScanConfig resolve_config(const Common& c) {
  ScanConfig cfg = c.config_path.empty() ? parse_config("{}", "defaults") : load_config(c.config_path);
  if (!c.evaluator.empty()) {
    try {
      cfg.evaluator = evaluator_from_string(c.evaluator);
    } catch (const DomainError& e) {
      throw ConfigError("--evaluator", e.what());
    }
  }
  return cfg;
}

fs::path prepare_out(const Common& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path.string(), "cannot open for writing");
  out << text;
  std::cout << path.string() << '\n';
}

std::size_t count_failed(const FieldMap& m) {
  std::size_t n = 0;
  for (const auto& c : m.cells) n += c.status == CellStatus::failed;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phased circular dipole array: fields, polarization and vortex topology"};
  app.require_subcommand(1);

  Common fm_opts;
  bool heatmap = false;
  bool timestamp = false;
  auto* fm = app.add_subcommand("field-map", "evaluate the configured grid at every z plane");
  add_common(fm, fm_opts);
  fm->add_flag("--heatmap", heatmap, "also write PNG heatmaps for the configured outputs");
  fm->add_flag("--timestamp", timestamp, "record the wall-clock time in the CSV header");

  Common rp_opts;
  double azimuth = 0.0;
  double rho_max = -1.0;
  int points = -1;
  bool rp_timestamp = false;
  auto* rp = app.add_subcommand("radial-profile", "1-D cut from the axis at fixed azimuth");
  add_common(rp, rp_opts);
  rp->add_option("--azimuth", azimuth, "azimuth in radians")->capture_default_str();
  rp->add_option("--rho-max", rho_max, "outer radius in m (default: grid half width)");
  rp->add_option("--points", points, "sample count; 1 gives the axis point only (default: grid resolution)");
  rp->add_flag("--timestamp", rp_timestamp, "record the wall-clock time in the CSV header");

  Common sg_opts;
  auto* sg = app.add_subcommand("singularities", "locate phase vortices and nulls of each component");
  add_common(sg, sg_opts);

  Common ma_opts;
  std::optional<int> ma_l;
  std::optional<int> ma_mz;
  std::optional<int> ma_n;
  auto* ma = app.add_subcommand("min-atoms", "emitter-count thresholds and leading vortex charges");
  add_common(ma, ma_opts);
  ma->add_option("--l", ma_l, "phase parameter (overrides the config)");
  ma->add_option("--m-z", ma_mz, "dipole m_z, -1 or +1 (overrides the config)");
  ma->add_option("--n", ma_n, "emitter count for the charge report (overrides the config)");

  Common vf_opts;
  std::optional<int> max_lattice_index;
  auto* vf = app.add_subcommand("verify", "run the acceptance suite; exit status 1 on any failure");
  vf->add_option("--threads", vf_opts.threads, "worker threads");
  vf->add_option("--out", vf_opts.out_dir, "also write verify_report.txt here");
  vf->add_option("--max-lattice-index", max_lattice_index, "force the series truncation M");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fm) {
      const ScanConfig cfg = resolve_config(fm_opts);
      const fs::path dir = prepare_out(fm_opts);
      auto maps = field_map(cfg, fm_opts.threads);
      const std::string stamp = timestamp ? utc_now() : "";
      for (std::size_t i = 0; i < maps.size(); ++i) {
        maps[i].timestamp = stamp;
        const std::string stem = "field_map_z" + std::to_string(i);
        write_file(dir / (stem + ".csv"), to_csv(maps[i]));
        if (const auto failed = count_failed(maps[i])) {
          std::cerr << "warning: " << failed << " cells failed to evaluate at z index " << i << '\n';
        }
        if (heatmap) {
          if (!heatmaps_supported()) {
            std::cerr << "warning: built without PNG support, no heatmaps written\n";
          } else {
            for (const auto& p : write_heatmaps(maps[i], dir, stem)) std::cout << p.string() << '\n';
          }
        }
      }
      return 0;
    }
    if (*rp) {
      const ScanConfig cfg = resolve_config(rp_opts);
      const fs::path dir = prepare_out(rp_opts);
      RadialSampling s{rho_max >= 0.0 ? rho_max : cfg.half_width, points > 0 ? points : cfg.resolution};
      if (points == 0) throw ConfigError("--points", "need at least one point");
      auto maps = radial_profile(cfg, azimuth, s, rp_opts.threads);
      const std::string stamp = rp_timestamp ? utc_now() : "";
      for (std::size_t i = 0; i < maps.size(); ++i) {
        maps[i].timestamp = stamp;
        write_file(dir / ("radial_profile_z" + std::to_string(i) + ".csv"), to_csv(maps[i]));
      }
      return 0;
    }
    if (*sg) {
      const ScanConfig cfg = resolve_config(sg_opts);
      const fs::path dir = prepare_out(sg_opts);
      const auto found = scan_singularities(cfg, sg_opts.threads);
      std::ofstream out(dir / "singularities.csv", std::ios::binary);
      if (!out) throw ConfigError((dir / "singularities.csv").string(), "cannot open for writing");
      write_singularities_csv(out, cfg, found);
      std::cout << (dir / "singularities.csv").string() << '\n';
      return 0;
    }
    if (*ma) {
      const ScanConfig cfg = resolve_config(ma_opts);
      const int l = ma_l.value_or(cfg.array.phase_param);
      const int m_z = ma_mz.value_or(cfg.array.m_z);
      const int n = ma_n.value_or(cfg.array.n_emitters);
      const AtomThresholds t = atom_thresholds(l, m_z);
      std::cout << "l = " << l << "\nm_z = " << m_z << "\nmin_atoms = " << min_atoms(l, m_z)
                << "\nthreshold_plus = " << t.plus << "\nthreshold_zero = " << t.zero
                << "\nthreshold_minus = " << t.minus << "\nN = " << n << '\n';
      for (const ChargeReport& r : leading_charges(l, m_z, n)) {
        std::cout << "leading_charge_" << to_string(r.component) << " =";
        for (int o : r.leading_orders) std::cout << ' ' << o;
        std::cout << (r.mixed() ? " (mixed)" : "") << '\n';
      }
      return 0;
    }
    if (*vf) {
      VerifyOptions opt;
      opt.threads = vf_opts.threads;
      opt.max_lattice_index = max_lattice_index;
      const VerifyReport report = run_acceptance(opt);
      write_report(std::cout, report);
      if (vf->count("--out")) {
        const fs::path dir = prepare_out(vf_opts);
        std::ofstream out(dir / "verify_report.txt", std::ios::binary);
        write_report(out, report);
      }
      return report.all_passed() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
