#include "vortex/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include <json.hpp>

#include "vortex/array_field.hpp"
#include "vortex/errors.hpp"
#include "vortex/parallel.hpp"
#include "vortex/polarization.hpp"
#include "vortex/scan.hpp"
#include "vortex/specfun.hpp"
#include "vortex/topology.hpp"

namespace vortex {
namespace {

using std::numbers::pi;

constexpr Component kComponents[] = {Component::plus, Component::zero, Component::minus};

ArrayConfig make_array(int n, int l, int m_z) {
  ArrayConfig a;
  a.n_emitters = n;
  a.phase_param = l;
  a.m_z = m_z;
  return a;
}

CriterionResult criterion(int id, std::string name, std::string comparison, double tolerance) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.comparison = std::move(comparison);
  r.tolerance = tolerance;
  return r;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Square grid of side 2 * half_width, optionally clipped to the inscribed disk.
std::vector<ObservationPoint> grid_points(int n, double half_width, double z, bool disk) {
  std::vector<ObservationPoint> pts;
  const double step = 2.0 * half_width / (n - 1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = -half_width + i * step;
      const double y = -half_width + j * step;
      if (disk && std::hypot(x, y) > half_width) continue;
      pts.push_back(ObservationPoint::from_cartesian(x, y, z));
    }
  }
  return pts;
}

// max_c max|a_c - b_c| / max|b_c| over the points, per component.
double componentwise_error(const std::vector<FieldAmplitudes>& a, const std::vector<FieldAmplitudes>& b) {
  double worst = 0.0;
  for (int q = 0; q < 3; ++q) {
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff = std::max(diff, std::abs(a[i][q] - b[i][q]));
      scale = std::max(scale, std::abs(b[i][q]));
    }
    if (scale > 0.0) worst = std::max(worst, diff / scale);
  }
  return worst;
}

std::vector<FieldAmplitudes> sample(const std::vector<ObservationPoint>& pts, int threads,
                                    const std::function<FieldAmplitudes(const ObservationPoint&)>& f) {
  std::vector<FieldAmplitudes> out(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) { out[i] = f(pts[i]); });
  return out;
}

CriterionResult series_sum_identity(const VerifyOptions& opt) {
  CriterionResult r = criterion(1, "series/sum identity", "<=", 1e-10);
  std::optional<TruncationPolicy> policy;
  if (opt.max_lattice_index) policy = TruncationPolicy{*opt.max_lattice_index, 1e-16};
  const auto t0 = std::chrono::steady_clock::now();
  for (int n : {3, 6, 12}) {
    for (int l : {1, 2, 3}) {
      const ArrayConfig a = make_array(n, l, -1);
      const double z_r = rayleigh_range(a);
      for (double z : {z_r, 2.0 * z_r}) {
        const auto pts = grid_points(64, 10.0 * a.wavelength, z, false);
        const auto sum = sample(pts, opt.threads, [&](const ObservationPoint& p) {
          return farfield_dipole_sum(a, p);
        });
        const auto series = sample(pts, opt.threads, [&](const ObservationPoint& p) {
          return evaluate(Evaluator::series, a, p, policy);
        });
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const double norm = std::sqrt(sum[i].norm2());
          for (int q = 0; q < 3; ++q) {
            const double diff = std::abs(series[i][q] - sum[i][q]);
            if (diff == 0.0) continue;
            r.measured = std::max(r.measured, norm > 0.0 ? diff / norm : INFINITY);
          }
        }
      }
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = r.measured <= r.tolerance && r.seconds < 10.0;
  r.detail = std::string("max_c |series_c - sum_c| / |field| per point; truncation ") +
             (policy ? "M=" + std::to_string(policy->max_lattice_index) : "default") +
             ", runtime " + fmt("%.2f", r.seconds) + " s (limit 10 s)";
  return r;
}

// Error of the far-field sum against the continuum limit, both reduced to the
// same normalization, over the disk rho <= 5 lambda at z_R.
double continuum_error(int n, int threads) {
  const ArrayConfig a = make_array(n, 1, -1);
  const auto pts = grid_points(41, 5.0 * a.wavelength, rayleigh_range(a), true);
  const auto sum = sample(pts, threads, [&](const ObservationPoint& p) { return farfield_dipole_sum(a, p); });
  const auto cont = sample(pts, threads, [&](const ObservationPoint& p) {
    const FieldAmplitudes g = continuum_to_farfield_factors(a, p);
    const FieldAmplitudes c = continuous_limit(a, p);
    return FieldAmplitudes{g.plus * c.plus, g.zero * c.zero, g.minus * c.minus};
  });
  return componentwise_error(sum, cont);
}

CriterionResult continuum_limit(const VerifyOptions& opt) {
  // Below this level differences are rounding noise of the two evaluators.
  constexpr double kRoundoffFloor = 1e-13;
  CriterionResult r = criterion(2, "continuum limit", "<=", 1e-3);
  const std::vector<int> counts{8, 16, 32, 64, 128, 256, 512};
  std::vector<double> errs;
  for (int n : counts) errs.push_back(continuum_error(n, opt.threads));
  r.measured = errs.back();
  bool monotone = true;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    if (errs[i] > std::max(errs[i - 1], kRoundoffFloor)) monotone = false;
  }
  r.passed = r.measured <= r.tolerance && monotone;
  r.detail = "N=512 error; sequence over N=8..512:";
  for (std::size_t i = 0; i < errs.size(); ++i) r.detail += " " + fmt("%.2e", errs[i]);
  r.detail += monotone ? " (non-increasing above 1e-13 floor)" : " (NOT monotone)";
  // Size of the first discarded lattice order at the disk edge for N = 8.
  const ArrayConfig a = make_array(counts.front(), 1, -1);
  const double x_max = cone_geometry(a, rayleigh_range(a)).kappa * 5.0 * a.wavelength;
  r.detail += "; lattice term bound J_7(" + fmt("%.3g", x_max) + ") = " +
              fmt("%.1e", std::abs(specfun::bessel_j(counts.front() - 1, x_max)));
  return r;
}

std::optional<PolarizationState> continuum_polarization(int l, int m_z, double x, double z_over_zr) {
  const ArrayConfig a = make_array(512, l, m_z);
  const double rho = x / a.wavenumber();
  return try_polarization_params(continuous_limit(a, {rho, 0.0, z_over_zr * rayleigh_range(a)}));
}

CriterionResult analytic_limits(const VerifyOptions&) {
  CriterionResult r = criterion(3, "analytic polarization limits", "<=", 2e-3);
  double worst = 0.0;
  // l = 0: orientation and alignment of a pure anti-aligned field.
  for (double x : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const auto s = continuum_polarization(0, -1, x, 10.0);
    if (!s) return r.detail = "l=0 field vanished", r;
    worst = std::max({worst, std::abs(s->p_z + 1.0), std::abs(s->p_zz - 1.0)});
  }
  const double l0 = worst;
  // l = 1 on the axis.
  const auto s1 = continuum_polarization(1, -1, 0.0, 10.0);
  if (!s1) return r.detail = "l=1 field vanished on axis", r;
  const double l1 = std::max(std::abs(s1->p_z), std::abs(s1->p_zz + 2.0));
  // l = 2: p_z changes sign at x = 2.
  double lo = 1.0;
  double hi = 3.0;
  auto pz = [](double x) { return continuum_polarization(2, -1, x, 10.0).value().p_z; };
  if (!(pz(lo) > 0.0 && pz(hi) < 0.0)) return r.detail = "l=2 p_z does not change sign on [1,3]", r;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pz(mid) > 0.0 ? lo : hi) = mid;
  }
  const double crossing = 0.5 * (lo + hi);
  const double l2 = std::abs(crossing - 2.0);
  r.measured = std::max({l0, l1, l2});
  r.passed = r.measured <= r.tolerance;
  r.detail = "l=0 dev " + fmt("%.2e", l0) + ", l=1 axis dev " + fmt("%.2e", l1) + ", l=2 p_z zero at x=" +
             fmt("%.9f", crossing);
  return r;
}

CriterionResult same_sign_saturation(const VerifyOptions&) {
  CriterionResult r = criterion(4, "same-sign saturation", "<=", 1e-3);
  for (auto [l, m_z] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{0, 1}}) {
    for (int eval = 0; eval < 2; ++eval) {
      const ArrayConfig a = make_array(eval == 0 ? 512 : 12, l, m_z);
      const double z = rayleigh_range(a);
      for (int i = 1; i <= 50; ++i) {
        const double x = 0.5 * i / 50.0;
        const ObservationPoint p{x / a.wavenumber(), 0.3, z};
        const auto s = try_polarization_params(eval == 0 ? continuous_limit(a, p) : farfield_dipole_sum(a, p));
        if (!s) return r.detail = "field vanished off axis", r;
        r.measured = std::max({r.measured, std::abs(s->p_z - 1.0), std::abs(s->p_zz - 1.0)});
      }
    }
  }
  r.passed = r.measured <= r.tolerance;
  r.detail = "max |p-1| over x in (0,0.5], continuum and N=12 far-field sum at z_R";
  return r;
}

CriterionResult propagation_invariance(const VerifyOptions& opt) {
  CriterionResult r = criterion(5, "propagation invariance", "<=", 1e-3);
  ScanConfig c;
  c.array = make_array(12, 1, -1);
  const double z_r = c.rayleigh_range();
  c.z_list = {z_r, 1.5 * z_r, 2.0 * z_r};
  c.evaluator = Evaluator::farfield;
  const RadialSampling s{3.0 * c.array.wavelength, 61};
  for (double azimuth : {0.0, pi}) {
    const auto profiles = radial_profile(c, azimuth, s, opt.threads);
    for (std::size_t i = 0; i < profiles[0].cells.size(); ++i) {
      for (std::size_t a = 0; a < profiles.size(); ++a) {
        for (std::size_t b = a + 1; b < profiles.size(); ++b) {
          const FieldCell& u = profiles[a].cells[i];
          const FieldCell& v = profiles[b].cells[i];
          if (u.status != CellStatus::defined || v.status != CellStatus::defined) {
            return r.detail = "undefined cell on the profile", r;
          }
          r.measured = std::max({r.measured, std::abs(u.polarization.p_z - v.polarization.p_z),
                                 std::abs(u.polarization.p_zz - v.polarization.p_zz)});
        }
      }
    }
  }
  r.passed = r.measured <= r.tolerance;
  r.detail = "max pairwise |dp_z|, |dp_zz| over |rho_x| <= 3 lambda, z = 1, 1.5, 2 z_R";
  return r;
}

std::optional<int> winding_at_axis(const ArrayConfig& a, Component c) {
  const FieldSampler sampler = make_sampler(Evaluator::farfield, a);
  return winding_number(sampler, c, 0.5 * a.wavelength, rayleigh_range(a), 256);
}

CriterionResult min_atom_thresholds(const VerifyOptions&) {
  CriterionResult r = criterion(6, "minimum-N thresholds", ">=", 6.0);
  std::string detail;
  int satisfied = 0;
  for (int l : {1, 2, 3}) {
    const int n_min = min_atoms(l, -1);
    bool all_match = true;
    for (Component c : kComponents) {
      const auto w = winding_at_axis(make_array(n_min, l, -1), c);
      if (!w || *w != base_order(make_array(n_min, l, -1), c)) all_match = false;
    }
    bool deviates = false;
    std::string below;
    for (Component c : kComponents) {
      const ArrayConfig a = make_array(n_min - 1, l, -1);
      std::string shown;
      try {
        const auto w = winding_at_axis(a, c);
        shown = w ? std::to_string(*w) : "undefined";
        if (!w || *w != base_order(a, c)) deviates = true;
      } catch (const ResolutionError&) {
        shown = "unresolved";
        deviates = true;
      }
      below += std::string(to_string(c)) + "=" + shown + " ";
    }
    satisfied += int(all_match) + int(deviates);
    detail += "l=" + std::to_string(l) + ": N=" + std::to_string(n_min) + (all_match ? " matches" : " MISMATCH") +
              ", N=" + std::to_string(n_min - 1) + " [" + below.substr(0, below.size() - 1) + "]" +
              (deviates ? " deviates; " : " NO deviation; ");
  }
  r.measured = satisfied;
  r.passed = satisfied == 6;
  r.detail = "checks satisfied (3 at threshold + 3 below); " + detail.substr(0, detail.size() - 2);
  return r;
}

CriterionResult three_atom_anomaly(const VerifyOptions&) {
  CriterionResult r = criterion(7, "N=3 l=2 anomaly", "<=", 0.0);
  const ChargeReport rep = leading_charge(Component::minus, 2, -1, 3);
  const auto w = winding_at_axis(make_array(3, 2, -1), Component::minus);
  const bool charge_ok = rep.leading_orders == std::vector<int>{-1};
  const bool winding_ok = w && *w == -1;
  r.measured = w ? std::abs(*w + 1) : 1.0;
  r.passed = charge_ok && winding_ok;
  std::string orders;
  for (int o : rep.leading_orders) orders += (orders.empty() ? "" : ",") + std::to_string(o);
  r.detail = "leading_charges minus = {" + orders + "}, winding at lambda/2 = " +
             (w ? std::to_string(*w) : std::string("undefined"));
  return r;
}

CriterionResult symmetry_and_bounds(const VerifyOptions& opt) {
  CriterionResult r = criterion(8, "symmetry and bounds", "<=", 1e-12);
  constexpr double kFluxFloor = 1e-6;  // relative to the map maximum
  long violations = 0;
  long cells = 0;
  struct Case {
    int n, l, m_z;
    Evaluator e;
  };
  const Case cases[] = {{3, 1, -1, Evaluator::farfield}, {3, 2, -1, Evaluator::farfield},
                        {12, 1, -1, Evaluator::farfield}, {12, 2, -1, Evaluator::farfield},
                        {3, 1, 1, Evaluator::farfield},  {12, 2, 1, Evaluator::farfield},
                        {6, 3, -1, Evaluator::series},   {3, 2, -1, Evaluator::exact}};
  for (const Case& k : cases) {
    ScanConfig c;
    c.array = make_array(k.n, k.l, k.m_z);
    c.evaluator = k.e;
    c.resolution = 24;
    c.outputs = {OutputKind::flux, OutputKind::all_params};
    for (const FieldMap& m : field_map(c, opt.threads)) {
      double f_max = 0.0;
      for (const FieldCell& cell : m.cells) f_max = std::max(f_max, cell.flux);
      std::vector<double> rotated(m.cells.size());
      const double turn = 2.0 * pi / k.n;
      parallel_for(m.cells.size(), opt.threads, [&](std::size_t i) {
        const FieldCell& cell = m.cells[i];
        const double x = cell.x * std::cos(turn) - cell.y * std::sin(turn);
        const double y = cell.x * std::sin(turn) + cell.y * std::cos(turn);
        rotated[i] = evaluate_cell(c, x, y, m.z).flux;
      });
      for (std::size_t i = 0; i < m.cells.size(); ++i) {
        const FieldCell& cell = m.cells[i];
        ++cells;
        if (cell.status == CellStatus::failed) {
          ++violations;
          continue;
        }
        const double scale = std::max({cell.flux, rotated[i], kFluxFloor * f_max});
        r.measured = std::max(r.measured, std::abs(cell.flux - rotated[i]) / scale);
        if (cell.status == CellStatus::defined && !cell.polarization.within_bounds()) ++violations;
      }
    }
  }
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> log_scale(-30.0, 30.0);
  long random_violations = 0;
  for (int i = 0; i < 100000; ++i) {
    FieldAmplitudes a{{gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)}};
    a = std::pow(10.0, log_scale(rng)) * a;
    if (i % 7 == 0) a[i % 3] = 0.0;
    if (i % 11 == 0) a[(i + 1) % 3] = 0.0;
    const auto s = try_polarization_params(a);
    if (s && !s->within_bounds()) ++random_violations;
  }
  r.passed = r.measured <= r.tolerance && violations == 0 && random_violations == 0;
  r.detail = "max relative flux asymmetry under 2pi/N rotation over " + std::to_string(cells) +
             " exported cells; bound violations: maps " + std::to_string(violations) + ", 1e5 random triples " +
             std::to_string(random_violations);
  return r;
}

double ring_relative_variance(int n, double rho, double z) {
  const ArrayConfig a = make_array(n, 1, -1);
  const double theta = cone_geometry(a, z).theta_k;
  std::vector<double> f;
  for (int i = 0; i < 720; ++i) {
    const ObservationPoint p{rho, 2.0 * pi * i / 720.0, z};
    f.push_back(flux_density(electric_field(farfield_dipole_sum(a, p), 1.0), theta));
  }
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= double(f.size());
  double var = 0.0;
  for (double v : f) var += (v - mean) * (v - mean);
  var /= double(f.size());
  return var / (mean * mean);
}

CriterionResult ring_transition(const VerifyOptions&) {
  CriterionResult r = criterion(9, "lattice-to-ring transition", ">=", 10.0);
  const ArrayConfig ring = make_array(12, 1, -1);
  const double z = 2.0 * rayleigh_range(ring);
  const double theta = cone_geometry(ring, z).theta_k;
  // First maximum of the azimuthally averaged N = 12 flux.
  auto averaged = [&](double rho) {
    double s = 0.0;
    for (int i = 0; i < 36; ++i) {
      s += flux_density(electric_field(farfield_dipole_sum(ring, {rho, 2.0 * pi * i / 36.0, z}), 1.0), theta);
    }
    return s / 36.0;
  };
  const double step = 2e-5;
  double rho = step;
  double prev = averaged(0.0);
  double cur = averaged(rho);
  while (rho < 5e-3) {
    const double next = averaged(rho + step);
    if (cur > prev && cur >= next) break;
    prev = cur;
    cur = next;
    rho += step;
  }
  // Golden-section refinement inside the bracketing steps.
  double lo = rho - step;
  double hi = rho + step;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 40; ++it) {
    const double a = hi - ratio * (hi - lo);
    const double b = lo + ratio * (hi - lo);
    if (averaged(a) < averaged(b)) {
      lo = a;
    } else {
      hi = b;
    }
  }
  rho = 0.5 * (lo + hi);
  const double v3 = ring_relative_variance(3, rho, z);
  const double v12 = ring_relative_variance(12, rho, z);
  r.measured = v12 > 0.0 ? v3 / v12 : std::numeric_limits<double>::infinity();
  r.passed = r.measured >= r.tolerance;
  r.detail = "ring rho = " + fmt("%.4e", rho) + " m; relative variance N=3 " + fmt("%.3e", v3) + ", N=12 " +
             fmt("%.3e", v12);
  return r;
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

VerifyReport run_acceptance(const VerifyOptions& options) {
  using Check = CriterionResult (*)(const VerifyOptions&);
  const std::pair<int, Check> checks[] = {
      {1, series_sum_identity},    {2, continuum_limit},     {3, analytic_limits},
      {4, same_sign_saturation},   {5, propagation_invariance}, {6, min_atom_thresholds},
      {7, three_atom_anomaly},     {8, symmetry_and_bounds}, {9, ring_transition}};
  VerifyReport report;
  for (const auto& [id, check] : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = check(options);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.passed = false;
      r.measured = std::numeric_limits<double>::quiet_NaN();
      r.detail = std::string("raised: ") + e.what();
    }
    if (r.seconds == 0.0) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.results.push_back(std::move(r));
  }
  return report;
}

void write_report(std::ostream& out, const VerifyReport& report) {
  nlohmann::json summary = nlohmann::json::array();
  for (const CriterionResult& r : report.results) {
    char line[256];
    std::snprintf(line, sizeof line, "%s  %d  %-30s measured=%.6e %s %.3e  (%.2f s)", r.passed ? "PASS" : "FAIL",
                  r.id, r.name.c_str(), r.measured, r.comparison.c_str(), r.tolerance, r.seconds);
    out << line << "\n      " << r.detail << '\n';
    nlohmann::json j = {{"id", r.id},         {"name", r.name},           {"comparison", r.comparison},
                        {"tolerance", r.tolerance}, {"passed", r.passed}, {"seconds", r.seconds}};
    j["measured"] = std::isfinite(r.measured) ? nlohmann::json(r.measured) : nlohmann::json(fmt("%g", r.measured));
    summary.push_back(j);
  }
  const long passed = std::count_if(report.results.begin(), report.results.end(),
                                    [](const CriterionResult& r) { return r.passed; });
  nlohmann::json root = {{"criteria", summary},
                         {"passed", passed},
                         {"failed", long(report.results.size()) - passed},
                         {"all_passed", report.all_passed()}};
  out << "--- summary (json) ---\n" << root.dump(2) << "\n--- end summary ---\n";
}

}  // namespace vortex
