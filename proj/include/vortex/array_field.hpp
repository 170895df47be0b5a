#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vortex {

using cplx = std::complex<double>;

/// Geometry and phase program of the emitter ring.
///
/// Emitter j sits at azimuth 2*pi*j/N on a circle of radius `radius` in the
/// z = 0 plane and radiates with phase exp(i * phase_param * phi_j). Every
/// emitter is a circular dipole with magnetic quantum number m_z.
struct ArrayConfig {
  int n_emitters = 12;
  double radius = 1e-3;       // m
  int phase_param = 1;        // l
  int m_z = -1;               // -1 or +1
  double wavelength = 1e-6;   // m
  double amplitude_scale = 1.0;
  // Multiply every evaluator by [(1 + cos^2 theta_k) / 2]^(-1/2).
  bool helicity_normalization = false;

  double wavenumber() const;
  /// Throws DomainError on the first violated invariant.
  void validate() const;
};

/// Rayleigh range pi * w0^2 / lambda of a beam whose waist equals the ring radius.
double rayleigh_range(const ArrayConfig& config);

/// Point in the observation plane, cylindrical coordinates.
struct ObservationPoint {
  double rho = 0.0;      // m, >= 0
  double phi_rho = 0.0;  // rad
  double z = 1.0;        // m, > 0

  static ObservationPoint from_cartesian(double x, double y, double z);
  double x() const;
  double y() const;
};

/// Ring opening angle and transverse wavenumber seen from the plane at z.
struct ConeGeometry {
  double k;          // 2 pi / lambda
  double theta_k;    // arctan(R / z)
  double cos_theta;
  double sin_theta;
  double kappa;      // k sin(theta_k)
};

ConeGeometry cone_geometry(const ArrayConfig& config, double z);

/// Coefficients of the spherical basis vectors eta_{+1}, eta_0, eta_{-1}
/// (eta_{+-1} = (-+x - i y)/sqrt2, eta_0 = z-hat).
struct FieldAmplitudes {
  cplx plus{};
  cplx zero{};
  cplx minus{};

  double norm2() const { return std::norm(plus) + std::norm(zero) + std::norm(minus); }
  cplx& operator[](int q);
  const cplx& operator[](int q) const;

  friend FieldAmplitudes operator*(cplx s, const FieldAmplitudes& a) {
    return {s * a.plus, s * a.zero, s * a.minus};
  }
  friend bool operator==(const FieldAmplitudes&, const FieldAmplitudes&) = default;
};

/// Spherical component selector. Index order matches FieldAmplitudes::operator[].
enum class Component { plus = 0, zero = 1, minus = 2 };

std::string_view to_string(Component c);
/// Offset added to l + m_z to obtain the component's leading Bessel order.
int order_offset(Component c);
/// l + m_z + order_offset(c).
int base_order(const ArrayConfig& config, Component c);

/// Lattice truncation for the Bessel series: orders base + m N, |m| <= max_lattice_index.
/// Terms whose Bessel magnitude is below term_floor times the largest
/// magnitude in the same lattice are skipped.
struct TruncationPolicy {
  int max_lattice_index = 1;
  double term_floor = 1e-16;

  void validate() const;
};

/// Smallest policy whose first discarded order exceeds kappa*rho_max + 40.
TruncationPolicy default_truncation(const ArrayConfig& config, double kappa_rho_max);

struct Emitter {
  double phi;
  std::array<double, 3> position;
};

std::vector<Emitter> emitter_positions(const ArrayConfig& config);

/// Direct sum over emitters with exact distances and emission angles.
/// Throws SingularityError if the point sits on an emitter.
FieldAmplitudes exact_dipole_sum(const ArrayConfig& config, const ObservationPoint& point);

/// Far-field sum (z >> R >> rho): common 1/z, common emission angle theta_k,
/// linearized per-emitter phase. Throws DomainError for z <= 0.
FieldAmplitudes farfield_dipole_sum(const ArrayConfig& config, const ObservationPoint& point);

/// The far-field sum rewritten as lattices of Bessel vortices.
FieldAmplitudes jacobi_anger_series(const ArrayConfig& config, const ObservationPoint& point,
                                    const TruncationPolicy& policy);
FieldAmplitudes jacobi_anger_series(const ArrayConfig& config, const ObservationPoint& point);

/// N -> infinity limit: three Bessel vortices of orders l+m_z-1, l+m_z, l+m_z+1.
FieldAmplitudes continuous_limit(const ArrayConfig& config, const ObservationPoint& point);

/// Per-component factors g with farfield_leading = g * continuous_limit,
/// where farfield_leading keeps only the m = 0 lattice terms. The two
/// evaluators carry different overall constants and phases; this is the
/// exact ratio, including the quadratic wavefront phase k rho^2 / 2z that the
/// Bessel-beam form lacks. For m_z = +1 the longitudinal factor carries an
/// extra sign relative to the transverse ones.
FieldAmplitudes continuum_to_farfield_factors(const ArrayConfig& config,
                                              const ObservationPoint& point);

/// E = -i omega A. Throws DomainError for omega <= 0.
FieldAmplitudes electric_field(const FieldAmplitudes& a, double omega);

/// cos(theta_k) (|E|^2 + |B|^2) / 4 with |B| = |E| (arbitrary units).
double flux_density(const FieldAmplitudes& e, double theta_k);

enum class Evaluator { exact, farfield, series, continuous };

std::string_view to_string(Evaluator e);
/// Throws DomainError for an unknown name.
Evaluator evaluator_from_string(std::string_view name);

/// Dispatch helper. `policy` is only used by the series evaluator; without
/// one, default_truncation is chosen per point.
FieldAmplitudes evaluate(Evaluator evaluator, const ArrayConfig& config,
                         const ObservationPoint& point,
                         const std::optional<TruncationPolicy>& policy = std::nullopt);

}  // namespace vortex
