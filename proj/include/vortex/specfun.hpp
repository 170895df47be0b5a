#pragma once

#include <span>
#include <vector>

namespace vortex::specfun {

/// Bessel function of the first kind J_n(x) for integer order n and real x.
///
/// Small arguments (relative to the order) use the ascending series; all
/// other arguments use Miller's backward recurrence normalized with
/// J_0 + 2 sum_k J_2k = 1. Negative n and negative x are folded onto
/// n >= 0, x >= 0 with J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
///
/// Throws DomainError for non-finite x.
double bessel_j(int n, double x);

/// J_0(x) .. J_{n_max}(x) from a single backward sweep. `out` must hold
/// n_max + 1 values.
void bessel_j_orders(double x, std::span<double> out);
std::vector<double> bessel_j_orders(int n_max, double x);

/// Emission amplitudes of a circular (m_z = +-1) or linear (m_z = 0) dipole
/// into the two photon helicities at polar angle theta.
struct HelicityWeights {
  double alpha_plus;
  double alpha_minus;
};

/// (1 + m_z cos theta) / 2 and (1 - m_z cos theta) / 2.
/// Throws DomainError for m_z outside {-1, 0, 1}.
HelicityWeights wigner_d1(int m_z, double theta);

}  // namespace vortex::specfun
