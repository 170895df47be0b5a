#include "vortex/array_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <quadmath.h>

#include "vortex/errors.hpp"
#include "vortex/specfun.hpp"

namespace vortex {
namespace {

using std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

using xreal = long double;
using xcplx = std::complex<xreal>;
constexpr xreal kPiX = std::numbers::pi_v<xreal>;

// Emitter positions are exact N-th roots of unity; powers are looked up by
// reduced index so that e^{i n phi_j} is bit-identical under j -> j + N.
// Extended precision: the direct sums below cancel down to (kappa rho)^n.
class RootsOfUnity {
 public:
  explicit RootsOfUnity(int n) : roots_(static_cast<std::size_t>(n)) {
    for (int r = 0; r < n; ++r) roots_[std::size_t(r)] = std::polar(xreal(1), 2 * kPiX * r / n);
  }
  // e^{i * power * 2 pi j / N}
  xcplx operator()(long long power, long long j) const {
    const long long n = static_cast<long long>(roots_.size());
    long long r = (power * j) % n;
    if (r < 0) r += n;
    return roots_[std::size_t(r)];
  }

 private:
  std::vector<xcplx> roots_;
};

cplx narrow(const xcplx& v) { return {double(v.real()), double(v.imag())}; }

using quad_real = __float128;

template <class R>
struct precision;

template <>
struct precision<xreal> {
  static xreal pi() { return kPiX; }
  static void sincos(xreal a, xreal& s, xreal& c) {
    s = std::sin(a);
    c = std::cos(a);
  }
};

template <>
struct precision<quad_real> {
  static quad_real pi() { return M_PIq; }
  static void sincos(quad_real a, quad_real& s, quad_real& c) { sincosq(a, &s, &c); }
};

// sum_j e^{i b phi_j} e^{-i x cos(phi_rho - phi_j)} for three orders b.
// The unit part of each phase factor sums to N or 0 exactly; only the
// remainder e^{-iu} - 1 = -2 sin^2(u/2) - i sin(u) is accumulated.
template <class R>
std::array<cplx, 3> lattice_sums(int n, const std::array<int, 3>& orders, double x, double phi_rho) {
  const R two_pi = 2 * precision<R>::pi();
  std::vector<R> c(static_cast<std::size_t>(n)), sn(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) precision<R>::sincos(two_pi * r / n, sn[std::size_t(r)], c[std::size_t(r)]);
  R s_rho, c_rho;
  precision<R>::sincos(R(phi_rho), s_rho, c_rho);
  std::array<R, 3> re{}, im{};
  for (int j = 0; j < n; ++j) {
    // cos(phi_rho - phi_j) from the exact root table.
    const R u = R(x) * (c_rho * c[std::size_t(j)] + s_rho * sn[std::size_t(j)]);
    R sh, ch;
    precision<R>::sincos(u / 2, sh, ch);
    const R rest_re = -2 * sh * sh;
    const R rest_im = -2 * sh * ch;
    for (int q = 0; q < 3; ++q) {
      long long idx = (static_cast<long long>(orders[q]) * j) % n;
      if (idx < 0) idx += n;
      const R rr = c[std::size_t(idx)];
      const R ri = sn[std::size_t(idx)];
      re[q] += rr * rest_re - ri * rest_im;
      im[q] += rr * rest_im + ri * rest_re;
    }
  }
  std::array<cplx, 3> out;
  for (int q = 0; q < 3; ++q) {
    const double unit = orders[q] % n == 0 ? double(n) : 0.0;
    out[q] = {unit + double(re[q]), double(im[q])};
  }
  return out;
}

// (-i)^n for any integer n.
cplx minus_i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

void check_point(const ObservationPoint& p, const char* who) {
  if (!(std::isfinite(p.rho) && std::isfinite(p.phi_rho) && std::isfinite(p.z))) {
    throw DomainError(std::string(who) + ": observation point must be finite");
  }
  if (p.rho < 0.0) throw DomainError(std::string(who) + ": rho must be >= 0");
  if (p.z <= 0.0) throw DomainError(std::string(who) + ": z must be > 0");
}

// exp(i k z), reduced through the cycle count z / lambda.
cplx propagation_phase(const ArrayConfig& c, double z) {
  const double cycles = z / c.wavelength;
  return std::polar(1.0, 2.0 * pi * (cycles - std::floor(cycles)));
}

// Dipole bracket weights (1 + m_z cos^2), (1 - m_z cos^2), sin(2 theta)/sqrt2,
// written so that the small weight never comes from 1 - cos^2.
template <class T>
struct DipoleWeights {
  T plus;
  T minus;
  T zero;
};

template <class T>
DipoleWeights<T> dipole_weights(int m_z, T cos_t, T sin_t) {
  const T c2 = cos_t * cos_t;
  const T s2 = sin_t * sin_t;
  const T zero = std::numbers::sqrt2_v<T> * sin_t * cos_t;
  if (m_z > 0) return {1 + c2, s2, zero};
  return {s2, 1 + c2, zero};
}

double helicity_norm(const ArrayConfig& c, double cos_t) {
  if (!c.helicity_normalization) return 1.0;
  return 1.0 / std::sqrt(0.5 * (1.0 + cos_t * cos_t));
}

// Common factor of the far-field sum and the Bessel series.
cplx farfield_prefactor(const ArrayConfig& c, const ObservationPoint& p, const ConeGeometry& g) {
  const double R = c.radius;
  const double curvature = g.k * (R * R + p.rho * p.rho) / (2.0 * p.z);
  const double scale = c.amplitude_scale / (16.0 * pi * p.z) * helicity_norm(c, g.cos_theta);
  return scale * propagation_phase(c, p.z) * std::polar(1.0, curvature);
}

}  // namespace

double ArrayConfig::wavenumber() const { return 2.0 * pi / wavelength; }

void ArrayConfig::validate() const {
  if (n_emitters < 1) throw DomainError("n_emitters must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("radius must be > 0");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw DomainError("wavelength must be > 0");
  if (m_z != -1 && m_z != 1) throw DomainError("m_z must be -1 or +1");
  if (!std::isfinite(amplitude_scale)) throw DomainError("amplitude_scale must be finite");
}

double rayleigh_range(const ArrayConfig& config) {
  return pi * config.radius * config.radius / config.wavelength;
}

ObservationPoint ObservationPoint::from_cartesian(double x, double y, double z) {
  return {std::hypot(x, y), std::atan2(y, x), z};
}

double ObservationPoint::x() const { return rho * std::cos(phi_rho); }
double ObservationPoint::y() const { return rho * std::sin(phi_rho); }

ConeGeometry cone_geometry(const ArrayConfig& config, double z) {
  ConeGeometry g{};
  g.k = config.wavenumber();
  g.theta_k = std::atan2(config.radius, z);
  const double d = std::hypot(config.radius, z);
  g.cos_theta = z / d;
  g.sin_theta = config.radius / d;
  g.kappa = g.k * g.sin_theta;
  return g;
}

cplx& FieldAmplitudes::operator[](int q) {
  return q == 0 ? plus : (q == 1 ? zero : minus);
}

const cplx& FieldAmplitudes::operator[](int q) const {
  return q == 0 ? plus : (q == 1 ? zero : minus);
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::plus: return "plus";
    case Component::zero: return "zero";
    case Component::minus: return "minus";
  }
  return "?";
}

int order_offset(Component c) {
  switch (c) {
    case Component::plus: return -1;
    case Component::zero: return 0;
    case Component::minus: return 1;
  }
  return 0;
}

int base_order(const ArrayConfig& config, Component c) {
  return config.phase_param + config.m_z + order_offset(c);
}

void TruncationPolicy::validate() const {
  if (max_lattice_index < 1) throw DomainError("max_lattice_index must be >= 1");
  if (!(term_floor > 0.0)) throw DomainError("term_floor must be > 0");
}

TruncationPolicy default_truncation(const ArrayConfig& config, double kappa_rho_max) {
  const int widest_base = std::abs(config.phase_param + config.m_z) + 1;
  const double reach = std::max(kappa_rho_max, 0.0) + 40.0 + widest_base;
  const int m = std::max(1, int(std::ceil(reach / config.n_emitters)));
  return {m, 1e-16};
}

std::vector<Emitter> emitter_positions(const ArrayConfig& config) {
  config.validate();
  std::vector<Emitter> out;
  out.reserve(std::size_t(config.n_emitters));
  for (int j = 0; j < config.n_emitters; ++j) {
    const double phi = 2.0 * pi * j / config.n_emitters;
    out.push_back({phi, {config.radius * std::cos(phi), config.radius * std::sin(phi), 0.0}});
  }
  return out;
}

FieldAmplitudes exact_dipole_sum(const ArrayConfig& config, const ObservationPoint& point) {
  config.validate();
  check_point(point, "exact_dipole_sum");
  const int N = config.n_emitters;
  const int l = config.phase_param;
  const int m_z = config.m_z;
  const xreal R = config.radius;
  const xreal z = point.z;
  const xreal k = 2 * kPiX / xreal(config.wavelength);
  const RootsOfUnity roots(N);

  xcplx s_plus, s_zero, s_minus;
  for (int j = 0; j < N; ++j) {
    const xreal phi_j = 2 * kPiX * j / N;
    const xcplx e_j = roots(1, j);
    // Emitter seen from the foot of the observation point, in the frame
    // rotated by phi_j: r_j - rho = e^{i phi_j} (R - rho e^{i (phi_rho - phi_j)}).
    const xcplx v = R - std::polar(xreal(point.rho), xreal(point.phi_rho) - phi_j);
    const xreal d = std::abs(v);
    const xreal dist = std::hypot(z, d);
    if (dist <= 1e-12L * R) {
      throw SingularityError("exact_dipole_sum: observation point coincides with emitter " +
                             std::to_string(j));
    }
    const xcplx u = d > 0 ? e_j * v / d : e_j;  // e^{i phi'_j}
    const xreal excess = d * d / (dist + z);    // |r - r_j| - z
    const xcplx wave = std::polar(1 / dist, k * excess) * roots(l, j);

    const DipoleWeights<xreal> w = dipole_weights(m_z, z / dist, d / dist);
    const xcplx u_conj = std::conj(u);
    const xcplx rot_plus = m_z > 0 ? xcplx{1} : u_conj * u_conj;  // u^{m_z - 1}
    const xcplx rot_minus = m_z > 0 ? u * u : xcplx{1};           // u^{m_z + 1}
    const xcplx rot_zero = m_z > 0 ? u : u_conj;                   // u^{m_z}
    s_plus += wave * (w.plus * rot_plus);
    s_zero += wave * (w.zero * rot_zero);
    s_minus += wave * (w.minus * rot_minus);
  }
  const ConeGeometry g = cone_geometry(config, point.z);
  const cplx pre = propagation_phase(config, point.z) *
                   (config.amplitude_scale / (16.0 * pi * N) * helicity_norm(config, g.cos_theta));
  return {pre * narrow(s_plus), pre * narrow(s_zero), pre * narrow(s_minus)};
}

FieldAmplitudes farfield_dipole_sum(const ArrayConfig& config, const ObservationPoint& point) {
  config.validate();
  check_point(point, "farfield_dipole_sum");
  const int N = config.n_emitters;
  const ConeGeometry g = cone_geometry(config, point.z);
  const std::array<int, 3> orders{base_order(config, Component::plus), base_order(config, Component::zero),
                                  base_order(config, Component::minus)};
  const double x = g.kappa * point.rho;
  // Near the axis the sum cancels down to (kappa rho)^n; quad precision keeps
  // high-order vortices accurate relative to their own magnitude there.
  const std::array<cplx, 3> s = x < 1.0 ? lattice_sums<quad_real>(N, orders, x, point.phi_rho)
                                        : lattice_sums<xreal>(N, orders, x, point.phi_rho);
  const DipoleWeights<double> w = dipole_weights(config.m_z, g.cos_theta, g.sin_theta);
  const cplx pre = farfield_prefactor(config, point, g) / double(N);
  return {pre * w.plus * s[0], pre * w.zero * s[1], pre * w.minus * s[2]};
}

FieldAmplitudes jacobi_anger_series(const ArrayConfig& config, const ObservationPoint& point,
                                    const TruncationPolicy& policy) {
  config.validate();
  policy.validate();
  check_point(point, "jacobi_anger_series");
  const int N = config.n_emitters;
  const int M = policy.max_lattice_index;
  const ConeGeometry g = cone_geometry(config, point.z);
  const double x = g.kappa * point.rho;

  int n_max = 0;
  for (int q = 0; q < 3; ++q) {
    const int b = base_order(config, Component(q));
    n_max = std::max({n_max, std::abs(b - M * N), std::abs(b + M * N)});
  }
  const std::vector<double> j_table = specfun::bessel_j_orders(n_max, x);
  auto bessel = [&](int n) {
    const double v = j_table[std::size_t(std::abs(n))];
    return (n < 0 && (n & 1)) ? -v : v;
  };

  FieldAmplitudes c;
  for (int q = 0; q < 3; ++q) {
    const int b = base_order(config, Component(q));
    double largest = 0.0;
    for (int m = -M; m <= M; ++m) largest = std::max(largest, std::abs(bessel(b + m * N)));
    const double floor = policy.term_floor * largest;
    cplx acc;
    for (int m = -M; m <= M; ++m) {
      const int n = b + m * N;
      const double jn = bessel(n);
      if (std::abs(jn) < floor || jn == 0.0) continue;
      acc += minus_i_pow(n) * jn * std::polar(1.0, n * point.phi_rho);
    }
    c[q] = acc;
  }
  const DipoleWeights<double> w = dipole_weights(config.m_z, g.cos_theta, g.sin_theta);
  const cplx pre = farfield_prefactor(config, point, g);
  return {pre * w.plus * c.plus, pre * w.zero * c.zero, pre * w.minus * c.minus};
}

FieldAmplitudes jacobi_anger_series(const ArrayConfig& config, const ObservationPoint& point) {
  config.validate();
  check_point(point, "jacobi_anger_series");
  const ConeGeometry g = cone_geometry(config, point.z);
  return jacobi_anger_series(config, point, default_truncation(config, g.kappa * point.rho));
}

FieldAmplitudes continuous_limit(const ArrayConfig& config, const ObservationPoint& point) {
  config.validate();
  check_point(point, "continuous_limit");
  const ConeGeometry g = cone_geometry(config, point.z);
  const double x = g.kappa * point.rho;
  const int m_z = config.m_z;
  const int n_plus = base_order(config, Component::plus);
  const int n_zero = base_order(config, Component::zero);
  const int n_minus = base_order(config, Component::minus);

  // exp(i k_z z) with k_z = k cos(theta_k) = k - 2 k sin^2(theta_k / 2).
  const double half = std::sin(0.5 * g.theta_k);
  const cplx longitudinal =
      propagation_phase(config, point.z) * std::polar(1.0, -2.0 * g.k * point.z * half * half);
  const cplx pre = longitudinal * (std::sqrt(g.kappa / (2.0 * pi)) * config.amplitude_scale *
                                   helicity_norm(config, g.cos_theta));

  const DipoleWeights<double> w = dipole_weights(m_z, g.cos_theta, g.sin_theta);
  const double sin_2t = 2.0 * g.sin_theta * g.cos_theta;
  FieldAmplitudes a;
  a.plus = pre * (-0.5 * kI) * std::polar(specfun::bessel_j(n_plus, x) * w.plus, n_plus * point.phi_rho);
  a.minus = pre * (0.5 * kI) * std::polar(specfun::bessel_j(n_minus, x) * w.minus, n_minus * point.phi_rho);
  a.zero = pre * (m_z / (2.0 * std::numbers::sqrt2)) *
           std::polar(specfun::bessel_j(n_zero, x) * sin_2t, n_zero * point.phi_rho);
  return a;
}

FieldAmplitudes continuum_to_farfield_factors(const ArrayConfig& config,
                                              const ObservationPoint& point) {
  config.validate();
  check_point(point, "continuum_to_farfield_factors");
  const ConeGeometry g = cone_geometry(config, point.z);
  const double R = config.radius;
  const double half = std::sin(0.5 * g.theta_k);
  // Phi_farfield - k_z z, both measured after removing exp(i k z).
  const double phase =
      g.k * (2.0 * point.z * half * half + (R * R + point.rho * point.rho) / (2.0 * point.z));
  const double ratio = 2.0 * (1.0 / (16.0 * pi * point.z)) / std::sqrt(g.kappa / (2.0 * pi));
  const cplx common = ratio * std::polar(1.0, phase) *
                      minus_i_pow(config.phase_param + config.m_z - 2);
  return {common, -double(config.m_z) * common, common};
}

FieldAmplitudes electric_field(const FieldAmplitudes& a, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("electric_field: omega must be > 0");
  return cplx{0.0, -omega} * a;
}

double flux_density(const FieldAmplitudes& e, double theta_k) {
  return std::cos(theta_k) * e.norm2() / 2.0;
}

std::string_view to_string(Evaluator e) {
  switch (e) {
    case Evaluator::exact: return "exact";
    case Evaluator::farfield: return "farfield";
    case Evaluator::series: return "series";
    case Evaluator::continuous: return "continuous";
  }
  return "?";
}

Evaluator evaluator_from_string(std::string_view name) {
  for (Evaluator e : {Evaluator::exact, Evaluator::farfield, Evaluator::series, Evaluator::continuous}) {
    if (to_string(e) == name) return e;
  }
  throw DomainError("unknown evaluator '" + std::string(name) +
                    "' (expected exact, farfield, series or continuous)");
}

FieldAmplitudes evaluate(Evaluator evaluator, const ArrayConfig& config,
                         const ObservationPoint& point,
                         const std::optional<TruncationPolicy>& policy) {
  switch (evaluator) {
    case Evaluator::exact: return exact_dipole_sum(config, point);
    case Evaluator::farfield: return farfield_dipole_sum(config, point);
    case Evaluator::series:
      return policy ? jacobi_anger_series(config, point, *policy) : jacobi_anger_series(config, point);
    case Evaluator::continuous: return continuous_limit(config, point);
  }
  throw DomainError("unknown evaluator");
}

}  // namespace vortex
