#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "vortex/array_field.hpp"

namespace vortex {

/// Minimal-|n| members of the Bessel-order lattice {base + m N} of one
/// spherical component. Two entries (n and -n) mean the component is a
/// standing-wave superposition with no single winding.
struct ChargeReport {
  Component component = Component::zero;
  std::vector<int> leading_orders;
  int lattice_stride = 1;
  int base_order = 0;

  bool mixed() const { return leading_orders.size() > 1; }
};

/// Per-component emitter counts above which each component keeps its m = 0
/// vortex order: 2(l+m_z)-1, 2(l+m_z)+1 and 2(l+m_z)+3.
struct AtomThresholds {
  int plus;
  int zero;
  int minus;
};

AtomThresholds atom_thresholds(int l, int m_z);

/// 2(l + m_z) + 3: the strongest of the three component thresholds.
/// Throws DomainError for l < 0 or |m_z| != 1.
int min_atoms(int l, int m_z);

ChargeReport leading_charge(Component component, int l, int m_z, int n_emitters);
std::array<ChargeReport, 3> leading_charges(int l, int m_z, int n_emitters);

using FieldSampler = std::function<FieldAmplitudes(const ObservationPoint&)>;

/// Sampler bound to one evaluator and array configuration.
FieldSampler make_sampler(Evaluator evaluator, const ArrayConfig& config,
                          std::optional<TruncationPolicy> policy = std::nullopt);

struct LoopCenter {
  double x = 0.0;
  double y = 0.0;
};

/// Net phase winding of one component around a circle in the plane at z.
///
/// Samples K equally spaced azimuths, accumulates wrapped phase steps and
/// returns the total / 2 pi rounded to the nearest integer. Returns nullopt
/// when any sample is weaker than 1e-3 of the loop maximum. Throws
/// ResolutionError when a single step exceeds 0.9 pi (increase K), and
/// DomainError for loop_radius <= 0 or K < 64.
std::optional<int> winding_number(const FieldSampler& sampler, Component component,
                                  double loop_radius, double z, int samples = 256,
                                  LoopCenter center = {});

enum class SingularityKind { phase_vortex, flux_null };

std::string_view to_string(SingularityKind k);

struct SingularityRecord {
  double x = 0.0;  // m
  double y = 0.0;  // m
  SingularityKind kind = SingularityKind::flux_null;
  int winding = 0;  // nonzero for phase vortices
  Component component = Component::zero;
};

/// Square search grid: resolution nodes per axis spanning
/// [center - half_width, center + half_width] in x and y.
struct GridSpec {
  double half_width = 1e-5;
  int resolution = 81;
  double z = 1.0;
  LoopCenter center{};

  double spacing() const { return 2.0 * half_width / (resolution - 1); }
  double node_x(int i) const { return center.x - half_width + i * spacing(); }
  double node_y(int j) const { return center.y - half_width + j * spacing(); }
};

/// Finds phase vortices and deep nulls of one component.
///
/// Candidates are interior local minima of the component magnitude. Each is
/// checked with winding_number on a loop of two grid cells; a nonzero
/// winding yields a phase_vortex located by a linear fit on the enclosing
/// grid plaquette. Candidates without winding but below 1e-6 of the grid
/// maximum are reported as flux_null at the node.
std::vector<SingularityRecord> singularity_scan(const FieldSampler& sampler, const GridSpec& grid,
                                                Component component, int threads = 0);

}  // namespace vortex
