#pragma once

#include <array>
#include <optional>

#include "vortex/array_field.hpp"

namespace vortex {

/// Intensity plus the eight orientation (p_i) and alignment (p_ij) parameters
/// of a spin-1 field, normalized so that a pure eta_{+1} field has
/// p_z = p_zz = 1 and a pure eta_0 field has p_zz = -2.
struct PolarizationState {
  double intensity = 0.0;
  double p_x = 0.0;
  double p_y = 0.0;
  double p_z = 0.0;
  double p_xy = 0.0;
  double p_xz = 0.0;
  double p_yz = 0.0;
  double p_xx_minus_yy = 0.0;
  double p_zz = 0.0;

  /// True when every parameter lies in its physical range, widened by `slack`.
  bool within_bounds(double slack = 1e-12) const;
};

/// Cartesian amplitudes of the same field: a_x = (a- - a+)/sqrt2,
/// a_y = -i (a+ + a-)/sqrt2, a_z = a0.
struct CartesianAmplitudes {
  cplx x{};
  cplx y{};
  cplx z{};
};

CartesianAmplitudes to_cartesian(const FieldAmplitudes& a);
FieldAmplitudes to_spherical(const CartesianAmplitudes& c);

using Matrix3c = std::array<std::array<cplx, 3>, 3>;

/// rho_ij = a_i a_j^* of the unit-normalized Cartesian amplitudes.
/// Throws UndefinedPolarization for a zero field.
Matrix3c density_matrix(const FieldAmplitudes& a);

/// Throws UndefinedPolarization for a zero field.
PolarizationState polarization_params(const FieldAmplitudes& a);

/// nullopt where the field vanishes (an exact singularity).
std::optional<PolarizationState> try_polarization_params(const FieldAmplitudes& a);

/// Inverse map: rho_ij = (delta_ij - p_ij) / 3 - (i/2) eps_ijk p_k.
Matrix3c density_matrix_from_params(const PolarizationState& s);

struct OrientationAlignment {
  double p_z;
  double p_zz;
};

/// Leading order in theta_k of p_z and p_zz near the vortex axis, as a
/// function of x = k rho. Same-sign (m_z = +1) cases saturate at (1, 1);
/// m_z = -1 uses the component magnitudes of the Bessel small-argument
/// expansion. Throws UnsupportedCase for l < 0 or |m_z| != 1.
OrientationAlignment analytic_small_angle(int l, int m_z, double x);

namespace detail {
// Ratio form for m_z = -1, any l >= 2 (the l = 2 case reproduces the closed form).
OrientationAlignment anti_aligned_leading_order(int l, double x);
}  // namespace detail

}  // namespace vortex
