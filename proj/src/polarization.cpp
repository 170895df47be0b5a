#include "vortex/polarization.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vortex/errors.hpp"

namespace vortex {
namespace {

using std::numbers::sqrt2;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

namespace detail {

// m_z = -1, l >= 2. Component magnitudes |E+|^2 : |E-|^2 : |E0|^2 with the
// common power (x/2)^{2(l-2)} theta^{2l} divided out so that x = 0 is finite.
OrientationAlignment anti_aligned_leading_order(int l, double x) {
  if (l < 2) throw UnsupportedCase("anti_aligned_leading_order: needs l >= 2");
  const double u = 0.25 * x * x;
  const double f_plus = factorial(l - 2);
  const double f_zero = factorial(l - 1);
  const double f_minus = factorial(l);
  const double e_plus = 1.0 / (f_plus * f_plus);
  const double e_minus = 4.0 * u * u / (f_minus * f_minus);
  const double e_zero = 2.0 * u / (f_zero * f_zero);
  const double total = e_plus + e_minus + e_zero;
  return {(e_plus - e_minus) / total, (e_plus + e_minus - 2.0 * e_zero) / total};
}

}  // namespace detail

bool PolarizationState::within_bounds(double slack) const {
  auto in = [slack](double v, double lo, double hi) { return v >= lo - slack && v <= hi + slack; };
  return intensity >= 0.0 && in(p_x, -1, 1) && in(p_y, -1, 1) && in(p_z, -1, 1) &&
         in(p_xy, -1.5, 1.5) && in(p_xz, -1.5, 1.5) && in(p_yz, -1.5, 1.5) &&
         in(p_xx_minus_yy, -3, 3) && in(p_zz, -2, 1);
}

CartesianAmplitudes to_cartesian(const FieldAmplitudes& a) {
  const cplx minus_i{0.0, -1.0};
  return {(a.minus - a.plus) / sqrt2, minus_i * (a.plus + a.minus) / sqrt2, a.zero};
}

FieldAmplitudes to_spherical(const CartesianAmplitudes& c) {
  const cplx i{0.0, 1.0};
  return {(-c.x + i * c.y) / sqrt2, c.z, (c.x + i * c.y) / sqrt2};
}

Matrix3c density_matrix(const FieldAmplitudes& a) {
  const double intensity = a.norm2();
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw UndefinedPolarization("density_matrix: field vanishes, polarization is undefined");
  }
  const double s = 1.0 / std::sqrt(intensity);
  const CartesianAmplitudes c = to_cartesian(s * a);
  const std::array<cplx, 3> v{c.x, c.y, c.z};
  Matrix3c rho{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rho[i][j] = v[i] * std::conj(v[j]);
  return rho;
}

std::optional<PolarizationState> try_polarization_params(const FieldAmplitudes& a) {
  const double intensity = a.norm2();
  if (!(intensity > 0.0) || !std::isfinite(intensity)) return std::nullopt;

  const FieldAmplitudes u = (1.0 / std::sqrt(intensity)) * a;
  const double wp = std::norm(u.plus);
  const double w0 = std::norm(u.zero);
  const double wm = std::norm(u.minus);
  const cplx pm = u.plus * std::conj(u.minus);
  const cplx c0 = std::conj(u.zero);

  PolarizationState s;
  s.intensity = intensity;
  s.p_z = wp - wm;
  s.p_zz = wp + wm - 2.0 * w0;
  s.p_xx_minus_yy = 6.0 * pm.real();
  s.p_xy = -3.0 * pm.imag();
  s.p_xz = 3.0 / sqrt2 * ((u.plus - u.minus) * c0).real();
  s.p_yz = -3.0 / sqrt2 * ((u.plus + u.minus) * c0).imag();

  // p_i = i eps_ijk a_j a_k^*
  const CartesianAmplitudes c = to_cartesian(u);
  s.p_x = -2.0 * (c.y * std::conj(c.z)).imag();
  s.p_y = -2.0 * (c.z * std::conj(c.x)).imag();
  return s;
}

PolarizationState polarization_params(const FieldAmplitudes& a) {
  if (auto s = try_polarization_params(a)) return *s;
  throw UndefinedPolarization("polarization_params: field vanishes, polarization is undefined");
}

Matrix3c density_matrix_from_params(const PolarizationState& s) {
  const double p_xx = 0.5 * (s.p_xx_minus_yy - s.p_zz);
  const double p_yy = 0.5 * (-s.p_xx_minus_yy - s.p_zz);
  const std::array<std::array<double, 3>, 3> q{{{p_xx, s.p_xy, s.p_xz},
                                                 {s.p_xy, p_yy, s.p_yz},
                                                 {s.p_xz, s.p_yz, s.p_zz}}};
  const std::array<double, 3> p{s.p_x, s.p_y, s.p_z};
  Matrix3c rho{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double anti = 0.0;
      for (int k = 0; k < 3; ++k) {
        // Levi-Civita for a cyclic index set.
        const int e = (i == j || j == k || i == k) ? 0 : (((j - i + 3) % 3 == 1) ? 1 : -1);
        anti += e * p[k];
      }
      rho[i][j] = cplx{((i == j ? 1.0 : 0.0) - q[i][j]) / 3.0, -0.5 * anti};
    }
  }
  return rho;
}

OrientationAlignment analytic_small_angle(int l, int m_z, double x) {
  if (m_z != 1 && m_z != -1) {
    throw UnsupportedCase("analytic_small_angle: m_z must be +-1, got " + std::to_string(m_z));
  }
  if (l < 0) {
    throw UnsupportedCase("analytic_small_angle: no closed form for l < 0 (got " +
                          std::to_string(l) + ")");
  }
  if (!std::isfinite(x)) throw DomainError("analytic_small_angle: x must be finite");

  if (m_z == 1) return {1.0, 1.0};
  const double u = 0.25 * x * x;
  switch (l) {
    case 0: return {-1.0, 1.0};
    case 1: return {-u / (u + 0.5), (u - 1.0) / (u + 0.5)};
    case 2: return {(1.0 - u) / (1.0 + u), (1.0 + u * u - 4.0 * u) / (1.0 + u * u + 2.0 * u)};
    default: return detail::anti_aligned_leading_order(l, x);
  }
}

}  // namespace vortex
