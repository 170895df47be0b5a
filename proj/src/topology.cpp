#include "vortex/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vortex/errors.hpp"
#include "vortex/parallel.hpp"

namespace vortex {
namespace {

using std::numbers::pi;

constexpr double kWeakSample = 1e-3;    // relative to the loop maximum
constexpr double kMaxStep = 0.9 * pi;   // largest accepted phase step
constexpr double kDeepNull = 1e-6;      // relative to the grid maximum

void check_orientation(int l, int m_z) {
  if (l < 0) throw DomainError("l must be >= 0, got " + std::to_string(l));
  if (m_z != 1 && m_z != -1) throw DomainError("m_z must be -1 or +1, got " + std::to_string(m_z));
}

// Winding of the four corner values of one plaquette, counter-clockwise.
int plaquette_winding(cplx c00, cplx c10, cplx c11, cplx c01) {
  const std::array<cplx, 4> ring{c00, c10, c11, c01};
  double total = 0.0;
  for (int k = 0; k < 4; ++k) total += std::arg(ring[(k + 1) % 4] * std::conj(ring[k]));
  return int(std::lround(total / (2.0 * pi)));
}

// Zero of the least-squares linear model over the plaquette, in cell units
// relative to the lower-left corner. nullopt if the model is degenerate or the
// zero falls well outside the plaquette.
std::optional<std::array<double, 2>> linear_zero(cplx c00, cplx c10, cplx c11, cplx c01) {
  const cplx beta = 0.5 * ((c10 + c11) - (c00 + c01));
  const cplx gamma = 0.5 * ((c01 + c11) - (c00 + c10));
  const cplx alpha = 0.25 * (c00 + c10 + c11 + c01) - 0.5 * beta - 0.5 * gamma;
  const double det = beta.real() * gamma.imag() - gamma.real() * beta.imag();
  const double scale = std::abs(beta) * std::abs(gamma);
  if (scale == 0.0 || std::abs(det) < 1e-9 * scale) return std::nullopt;
  const double s = (-alpha.real() * gamma.imag() + gamma.real() * alpha.imag()) / det;
  const double t = (-beta.real() * alpha.imag() + alpha.real() * beta.imag()) / det;
  if (s < -0.25 || s > 1.25 || t < -0.25 || t > 1.25) return std::nullopt;
  return std::array<double, 2>{std::clamp(s, 0.0, 1.0), std::clamp(t, 0.0, 1.0)};
}

}  // namespace

AtomThresholds atom_thresholds(int l, int m_z) {
  check_orientation(l, m_z);
  const int j = l + m_z;
  return {2 * j - 1, 2 * j + 1, 2 * j + 3};
}

int min_atoms(int l, int m_z) { return atom_thresholds(l, m_z).minus; }

ChargeReport leading_charge(Component component, int l, int m_z, int n_emitters) {
  if (n_emitters < 1) throw DomainError("n_emitters must be >= 1");
  ChargeReport report;
  report.component = component;
  report.lattice_stride = n_emitters;
  report.base_order = l + m_z + order_offset(component);
  const int N = n_emitters;
  const int r = ((report.base_order % N) + N) % N;
  if (r == 0) {
    report.leading_orders = {0};
  } else if (r < N - r) {
    report.leading_orders = {r};
  } else if (r > N - r) {
    report.leading_orders = {r - N};
  } else {
    report.leading_orders = {r - N, r};
  }
  return report;
}

std::array<ChargeReport, 3> leading_charges(int l, int m_z, int n_emitters) {
  return {leading_charge(Component::plus, l, m_z, n_emitters),
          leading_charge(Component::zero, l, m_z, n_emitters),
          leading_charge(Component::minus, l, m_z, n_emitters)};
}

FieldSampler make_sampler(Evaluator evaluator, const ArrayConfig& config,
                          std::optional<TruncationPolicy> policy) {
  config.validate();
  return [evaluator, config, policy](const ObservationPoint& p) {
    return evaluate(evaluator, config, p, policy);
  };
}

std::optional<int> winding_number(const FieldSampler& sampler, Component component,
                                  double loop_radius, double z, int samples, LoopCenter center) {
  if (!(loop_radius > 0.0)) throw DomainError("winding_number: loop_radius must be > 0");
  if (samples < 64) throw DomainError("winding_number: need at least 64 samples");

  const int q = int(component);
  std::vector<cplx> values(static_cast<std::size_t>(samples));
  double largest = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double a = 2.0 * pi * k / samples;
    const auto p = ObservationPoint::from_cartesian(center.x + loop_radius * std::cos(a),
                                                    center.y + loop_radius * std::sin(a), z);
    values[std::size_t(k)] = sampler(p)[q];
    largest = std::max(largest, std::abs(values[std::size_t(k)]));
  }
  if (largest == 0.0) return std::nullopt;
  for (const cplx& v : values) {
    if (std::abs(v) < kWeakSample * largest) return std::nullopt;
  }

  double total = 0.0;
  for (int k = 0; k < samples; ++k) {
    const cplx next = values[std::size_t((k + 1) % samples)];
    const double step = std::arg(next * std::conj(values[std::size_t(k)]));
    if (std::abs(step) > kMaxStep) {
      throw ResolutionError("winding_number: phase step of " + std::to_string(step) +
                            " rad between samples " + std::to_string(k) +
                            "; increase the sample count above " + std::to_string(samples));
    }
    total += step;
  }
  return int(std::lround(total / (2.0 * pi)));
}

std::string_view to_string(SingularityKind k) {
  return k == SingularityKind::phase_vortex ? "phase-vortex" : "flux-null";
}

std::vector<SingularityRecord> singularity_scan(const FieldSampler& sampler, const GridSpec& grid,
                                                Component component, int threads) {
  if (grid.resolution < 3) throw DomainError("singularity_scan: resolution must be >= 3");
  if (!(grid.half_width > 0.0)) throw DomainError("singularity_scan: half_width must be > 0");
  const int n = grid.resolution;
  const int q = int(component);
  const double h = grid.spacing();

  std::vector<cplx> field(std::size_t(n) * n);
  parallel_for(field.size(), threads, [&](std::size_t idx) {
    const int i = int(idx % n);
    const int j = int(idx / n);
    field[idx] = sampler(ObservationPoint::from_cartesian(grid.node_x(i), grid.node_y(j), grid.z))[q];
  });
  auto at = [&](int i, int j) { return field[std::size_t(j) * n + i]; };
  double largest = 0.0;
  for (const cplx& v : field) largest = std::max(largest, std::abs(v));
  if (largest == 0.0) return {};

  struct Candidate {
    int i, j;
    double magnitude;
  };
  std::vector<Candidate> candidates;
  for (int j = 1; j < n - 1; ++j) {
    for (int i = 1; i < n - 1; ++i) {
      const double m = std::abs(at(i, j));
      bool minimum = true;
      for (int dj = -1; dj <= 1 && minimum; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const double other = std::abs(at(i + di, j + dj));
          // Ties go to the earliest node in row-major order.
          const bool earlier = dj < 0 || (dj == 0 && di < 0);
          if (other < m || (earlier && other == m)) {
            minimum = false;
            break;
          }
        }
      }
      if (minimum) candidates.push_back({i, j, m});
    }
  }

  std::vector<SingularityRecord> records;
  std::vector<double> record_magnitude;
  for (const Candidate& c : candidates) {
    const LoopCenter node{grid.node_x(c.i), grid.node_y(c.j)};
    std::optional<int> w;
    bool measured = false;
    for (int k : {128, 512}) {
      try {
        w = winding_number(sampler, component, 2.0 * h, grid.z, k, node);
        measured = true;
        break;
      } catch (const ResolutionError&) {
      }
    }
    const bool deep = c.magnitude < kDeepNull * largest;
    if (measured && w && *w != 0) {
      SingularityRecord r{node.x, node.y, SingularityKind::phase_vortex, *w, component};
      bool located = false;
      for (int b : {c.j - 1, c.j}) {
        for (int a : {c.i - 1, c.i}) {
          if (located) break;
          const cplx c00 = at(a, b), c10 = at(a + 1, b), c11 = at(a + 1, b + 1), c01 = at(a, b + 1);
          if (plaquette_winding(c00, c10, c11, c01) == 0) continue;
          if (auto st = linear_zero(c00, c10, c11, c01)) {
            r.x = grid.node_x(a) + (*st)[0] * h;
            r.y = grid.node_y(b) + (*st)[1] * h;
            located = true;
          }
        }
      }
      records.push_back(r);
      record_magnitude.push_back(c.magnitude);
    } else if (deep) {
      records.push_back({node.x, node.y, SingularityKind::flux_null, 0, component});
      record_magnitude.push_back(c.magnitude);
    }
  }

  // Two minima within one loop radius of each other describe the same vortex.
  std::vector<bool> keep(records.size(), true);
  for (std::size_t a = 0; a < records.size(); ++a) {
    for (std::size_t b = a + 1; b < records.size(); ++b) {
      if (!keep[a] || !keep[b]) continue;
      if (std::hypot(records[a].x - records[b].x, records[a].y - records[b].y) > 2.0 * h) continue;
      if (records[a].kind != records[b].kind) continue;
      keep[record_magnitude[a] <= record_magnitude[b] ? b : a] = false;
    }
  }
  std::vector<SingularityRecord> out;
  for (std::size_t a = 0; a < records.size(); ++a)
    if (keep[a]) out.push_back(records[a]);
  return out;
}

}  // namespace vortex
