#include "vortex/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vortex/errors.hpp"

namespace vortex::specfun {
namespace {

constexpr double kRescaleAbove = 1e250;
constexpr double kRescaleBy = 1e-250;

// Ascending series. Used only where x^2/4 <= n + 1, so terms decrease
// monotonically after the first and there is no cancellation to speak of.
double series_j(int n, double x) {
  const double half = 0.5 * x;
  double lead = 1.0;
  for (int k = 1; k <= n; ++k) lead *= half / k;
  if (lead == 0.0) return 0.0;

  const double q = -half * half;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (double(k) * double(n + k));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return lead * sum;
}

bool use_series(int n, double x) { return x * x <= 4.0 * (n + 1); }

// Even start index for the backward sweep, far enough above both the order
// and the turning point that J_start is negligible.
int miller_start(int n_max, double x) {
  const double top = std::max(double(n_max), x) + 30.0 + 20.0 * std::cbrt(x);
  int start = int(std::ceil(top));
  return start + (start & 1);
}

}  // namespace

double bessel_j(int n, double x) {
  if (!std::isfinite(x)) {
    throw DomainError("bessel_j: argument must be finite, got " + std::to_string(x));
  }
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (n & 1) sign = -sign;
  }
  if (x < 0.0) {
    x = -x;
    if (n & 1) sign = -sign;
  }
  if (x == 0.0) return n == 0 ? sign : 0.0;
  if (use_series(n, x)) return sign * series_j(n, x);

  const int start = miller_start(n, x);
  const double two_over_x = 2.0 / x;
  double j_above = 0.0;
  double j = 1.0;
  double norm = 0.0;
  double picked = 0.0;
  for (int k = start; k > 0; --k) {
    const double j_below = k * two_over_x * j - j_above;
    j_above = j;
    j = j_below;  // J_{k-1}
    const int order = k - 1;
    if (order == n) picked = j;
    if (order > 0 && (order & 1) == 0) norm += 2.0 * j;
    if (std::abs(j) > kRescaleAbove) {
      j *= kRescaleBy;
      j_above *= kRescaleBy;
      norm *= kRescaleBy;
      picked *= kRescaleBy;
    }
  }
  norm += j;
  return sign * picked / norm;
}

void bessel_j_orders(double x, std::span<double> out) {
  if (out.empty()) return;
  if (!std::isfinite(x)) {
    throw DomainError("bessel_j_orders: argument must be finite, got " + std::to_string(x));
  }
  const int n_max = int(out.size()) - 1;
  std::fill(out.begin(), out.end(), 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return;
  }
  const bool negative = x < 0.0;
  x = std::abs(x);

  const int start = miller_start(n_max, x);
  const double two_over_x = 2.0 / x;
  double j_above = 0.0;
  double j = 1.0;
  double norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double j_below = k * two_over_x * j - j_above;
    j_above = j;
    j = j_below;
    const int order = k - 1;
    if (order <= n_max) out[order] = j;
    if (order > 0 && (order & 1) == 0) norm += 2.0 * j;
    if (std::abs(j) > kRescaleAbove) {
      j *= kRescaleBy;
      j_above *= kRescaleBy;
      norm *= kRescaleBy;
      for (int m = std::max(order, 0); m <= n_max; ++m) out[m] *= kRescaleBy;
    }
  }
  norm += j;
  for (int m = 0; m <= n_max; ++m) {
    out[m] /= norm;
    if (negative && (m & 1)) out[m] = -out[m];
  }
}

std::vector<double> bessel_j_orders(int n_max, double x) {
  if (n_max < 0) throw DomainError("bessel_j_orders: n_max must be >= 0");
  std::vector<double> out(std::size_t(n_max) + 1);
  bessel_j_orders(x, out);
  return out;
}

HelicityWeights wigner_d1(int m_z, double theta) {
  if (m_z < -1 || m_z > 1) {
    throw DomainError("wigner_d1: m_z must be -1, 0 or +1, got " + std::to_string(m_z));
  }
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("wigner_d1: theta must lie in [0, pi]");
  }
  const double c = m_z * std::cos(theta);
  return {0.5 * (1.0 + c), 0.5 * (1.0 - c)};
}

}  // namespace vortex::specfun
