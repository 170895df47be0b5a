#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vortex/array_field.hpp"
#include "vortex/errors.hpp"
#include "vortex/specfun.hpp"
#include "vortex/topology.hpp"

using namespace vortex;
using std::numbers::pi;

namespace {

ArrayConfig ring(int n, int l, int m_z) {
  ArrayConfig a;
  a.n_emitters = n;
  a.phase_param = l;
  a.m_z = m_z;
  return a;
}

double component_error(const FieldAmplitudes& a, const FieldAmplitudes& b, double scale) {
  double e = 0.0;
  for (int q = 0; q < 3; ++q) e = std::max(e, std::abs(a[q] - b[q]) / scale);
  return e;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(ring(12, 1, -1).validate());
  CHECK_THROWS_AS(ring(0, 1, -1).validate(), DomainError);
  CHECK_THROWS_AS(ring(12, 1, 0).validate(), DomainError);
  ArrayConfig bad = ring(12, 1, -1);
  bad.radius = -1e-3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK(rayleigh_range(ring(12, 1, -1)) == doctest::Approx(pi).epsilon(1e-15));
}

TEST_CASE("emitter positions") {
  const auto one = emitter_positions(ring(1, 0, 1));
  REQUIRE(one.size() == 1);
  CHECK(one[0].phi == 0.0);
  CHECK(one[0].position[0] == 1e-3);
  CHECK(one[0].position[1] == 0.0);
  const auto four = emitter_positions(ring(4, 0, 1));
  REQUIRE(four.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(four[j].phi == doctest::Approx(j * pi / 2));
  for (const auto& e : emitter_positions(ring(17, 0, 1))) {
    CHECK(std::hypot(e.position[0], e.position[1]) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(e.position[2] == 0.0);
  }
}

TEST_CASE("single emitter seen from straight above") {
  ArrayConfig a = ring(1, 0, 1);
  const double z = 0.5;
  const ObservationPoint above{a.radius, 0.0, z};
  const FieldAmplitudes f = exact_dipole_sum(a, above);
  CHECK(std::abs(f.minus) == 0.0);
  CHECK(std::abs(f.zero) == 0.0);
  // (1 + cos^2 0) / (16 pi |r - r_j|) with A = 1, N = 1.
  CHECK(std::abs(f.plus) == doctest::Approx(2.0 / (16.0 * pi * z)).epsilon(1e-14));
}

TEST_CASE("emitter-coincident point is singular") {
  ArrayConfig a = ring(4, 1, -1);
  CHECK_THROWS_AS(exact_dipole_sum(a, {a.radius, 0.0, 1e-18}), SingularityError);
  CHECK_THROWS_AS(farfield_dipole_sum(a, {0.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(farfield_dipole_sum(a, {0.0, 0.0, -1.0}), DomainError);
  CHECK_THROWS_AS(farfield_dipole_sum(a, {-1e-6, 0.0, 1.0}), DomainError);
}

TEST_CASE("null selection on the axis") {
  // A component survives at rho = 0 iff its order lattice contains 0.
  for (int n : {1, 2, 3, 4, 5, 6, 12}) {
    for (int l : {0, 1, 2, 3}) {
      for (int m_z : {-1, 1}) {
        const ArrayConfig a = ring(n, l, m_z);
        const ObservationPoint axis{0.0, 0.0, rayleigh_range(a)};
        for (Evaluator e : {Evaluator::exact, Evaluator::farfield, Evaluator::series}) {
          const FieldAmplitudes f = evaluate(e, a, axis);
          // Largest single-emitter contribution: bracket <= 2 over 16 pi z.
          const double emitter = 2.0 / (16.0 * pi * axis.z);
          for (Component c : {Component::plus, Component::zero, Component::minus}) {
            const bool reachable = base_order(a, c) % n == 0;
            CAPTURE(n);
            CAPTURE(l);
            CAPTURE(m_z);
            CAPTURE(to_string(e));
            CAPTURE(to_string(c));
            if (reachable) {
              CHECK(std::abs(f[int(c)]) > 1e-12 * emitter);
            } else {
              CHECK(std::abs(f[int(c)]) <= 1e-14 * emitter);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("N=12 l=1 m_z=-1 on the axis: only a_zero survives") {
  const ArrayConfig a = ring(12, 1, -1);
  const ObservationPoint axis{0.0, 0.0, rayleigh_range(a)};
  const FieldAmplitudes s = jacobi_anger_series(a, axis);
  CHECK(s.plus == cplx{});
  CHECK(s.minus == cplx{});
  CHECK(std::abs(s.zero) > 0.0);
  const FieldAmplitudes f = farfield_dipole_sum(a, axis);
  CHECK(std::abs(f.zero - s.zero) <= 1e-15 * std::abs(s.zero));
}

TEST_CASE("series and far-field sum are the same function") {
  for (int n : {1, 2, 3, 5, 6, 12, 16}) {
    for (int l : {0, 1, 2, 3, 5}) {
      for (int m_z : {-1, 1}) {
        const ArrayConfig a = ring(n, l, m_z);
        const double z = 1.5 * rayleigh_range(a);
        double worst = 0.0;
        for (double rho : {0.0, 2e-6, 1e-5, 3e-4, 2e-3}) {
          for (double phi : {0.0, 0.7, 2.9}) {
            const ObservationPoint p{rho, phi, z};
            const FieldAmplitudes ff = farfield_dipole_sum(a, p);
            const FieldAmplitudes js = jacobi_anger_series(a, p);
            worst = std::max(worst, component_error(js, ff, std::sqrt(ff.norm2())));
          }
        }
        CAPTURE(n);
        CAPTURE(l);
        CAPTURE(m_z);
        CHECK(worst <= 1e-10);
      }
    }
  }
}

TEST_CASE("N=3 l=2: C_-1 is led by order -1") {
  const ArrayConfig a = ring(3, 2, -1);
  const ObservationPoint p{2e-6, 0.4, rayleigh_range(a)};
  // term_floor 0.5 keeps only the dominant lattice term.
  const FieldAmplitudes lead = jacobi_anger_series(a, p, {1, 0.5});
  const FieldAmplitudes full = jacobi_anger_series(a, p);
  // Next lattice term J_2 is smaller by about (kappa rho)^3 / 8.
  CHECK(std::abs(lead.minus - full.minus) <= 2e-3 * std::abs(full.minus));
  const ConeGeometry g = cone_geometry(a, p.z);
  const double x = g.kappa * p.rho;
  CHECK(std::abs(specfun::bessel_j(-1, x)) > 100.0 * std::abs(specfun::bessel_j(2, x)));
}

TEST_CASE("truncation policy validation") {
  const ArrayConfig a = ring(3, 1, -1);
  const ObservationPoint p{1e-6, 0.0, 3.0};
  CHECK_THROWS_AS(jacobi_anger_series(a, p, {0, 1e-16}), DomainError);
  CHECK_THROWS_AS(jacobi_anger_series(a, p, {1, 0.0}), DomainError);
  const TruncationPolicy d = default_truncation(a, 10.0);
  CHECK(d.max_lattice_index * a.n_emitters > 10.0 + 40.0);
}

TEST_CASE("exact sum approaches the far-field sum") {
  for (int n : {3, 12}) {
    for (int l : {1, 2}) {
      const ArrayConfig a = ring(n, l, -1);
      const double z = 2.0 * rayleigh_range(a);
      double worst = 0.0;
      for (double rho : {1e-6, 4e-6, 1e-5}) {
        for (double phi : {0.1, 1.3, 4.0}) {
          const ObservationPoint p{rho, phi, z};
          const FieldAmplitudes ex = exact_dipole_sum(a, p);
          const FieldAmplitudes ff = farfield_dipole_sum(a, p);
          worst = std::max(worst, component_error(ex, ff, std::sqrt(ff.norm2())));
        }
      }
      CAPTURE(n);
      CAPTURE(l);
      CHECK(worst < 1e-3);
    }
  }
}

TEST_CASE("continuum limit on the axis") {
  const ArrayConfig a = ring(512, 1, -1);
  const FieldAmplitudes f = continuous_limit(a, {0.0, 0.0, rayleigh_range(a)});
  CHECK(f.plus == cplx{});
  CHECK(f.minus == cplx{});
  CHECK(std::abs(f.zero) > 0.0);
  const ArrayConfig b = ring(512, 0, 1);
  const FieldAmplitudes g = continuous_limit(b, {0.0, 0.0, rayleigh_range(b)});
  CHECK(std::abs(g.plus) > 0.0);
  CHECK(g.zero == cplx{});
  CHECK(g.minus == cplx{});
}

TEST_CASE("continuum a_plus winds by l + m_z - 1") {
  for (int l : {0, 1, 2, 4}) {
    for (int m_z : {-1, 1}) {
      const ArrayConfig a = ring(512, l, m_z);
      const auto sampler = make_sampler(Evaluator::continuous, a);
      const auto w = winding_number(sampler, Component::plus, a.wavelength, rayleigh_range(a));
      REQUIRE(w.has_value());
      CHECK(*w == l + m_z - 1);
    }
  }
}

TEST_CASE("far-field sum converges to the continuum limit") {
  // Large kappa rho so the lattice error is visible above rounding.
  const ArrayConfig base = ring(4, 1, -1);
  const double z = rayleigh_range(base);
  double previous = INFINITY;
  for (int n : {4, 6, 8, 10, 12}) {
    const ArrayConfig a = ring(n, 1, -1);
    double err = 0.0;
    double scale = 0.0;
    for (int i = 0; i <= 20; ++i) {
      for (double phi : {0.0, 0.5, 1.1}) {
        const ObservationPoint p{2e-3 * i / 20.0, phi, z};
        const FieldAmplitudes g = continuum_to_farfield_factors(a, p);
        const FieldAmplitudes c = continuous_limit(a, p);
        const FieldAmplitudes lead{g.plus * c.plus, g.zero * c.zero, g.minus * c.minus};
        const FieldAmplitudes ff = farfield_dipole_sum(a, p);
        for (int q = 0; q < 3; ++q) err = std::max(err, std::abs(ff[q] - lead[q]));
        scale = std::max(scale, std::sqrt(ff.norm2()));
      }
    }
    CAPTURE(n);
    CHECK(err / scale < previous);
    previous = err / scale;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("dipole bracket versus Wigner weights") {
  // The bracket (1 +- m_z cos^2) differs from 2 d^1 = (1 +- m_z cos) by O(theta^2).
  for (double theta : {1e-4, 1e-2, 0.3}) {
    const auto w = specfun::wigner_d1(-1, theta);
    const double bracket = 0.5 * (1.0 + std::cos(theta) * std::cos(theta));
    CHECK(std::abs(bracket - w.alpha_minus) <= theta * theta);
  }
}

TEST_CASE("linearity and field-flux relations") {
  ArrayConfig a = ring(6, 2, -1);
  const ObservationPoint p{3e-4, 0.2, 4.0};
  const FieldAmplitudes f1 = farfield_dipole_sum(a, p);
  a.amplitude_scale = 3.0;
  const FieldAmplitudes f3 = farfield_dipole_sum(a, p);
  for (int q = 0; q < 3; ++q) CHECK(std::abs(f3[q] - 3.0 * f1[q]) <= 1e-15 * std::abs(f3[q]));
  const double theta = cone_geometry(a, p.z).theta_k;
  const double flux1 = flux_density(electric_field(f1, 1.0), theta);
  const double flux3 = flux_density(electric_field(f3, 1.0), theta);
  CHECK(flux3 == doctest::Approx(9.0 * flux1).epsilon(1e-14));
  CHECK(flux_density({}, theta) == 0.0);

  const FieldAmplitudes e = electric_field({1.0, 0.0, 0.0}, 1.0);
  CHECK(e.plus == cplx(0.0, -1.0));
  const FieldAmplitudes e2 = electric_field(f1, 2.5);
  CHECK(e2.norm2() == doctest::Approx(6.25 * f1.norm2()).epsilon(1e-14));
  CHECK_THROWS_AS(electric_field(f1, 0.0), DomainError);
}

TEST_CASE("flux rotation symmetry for every evaluator") {
  for (int n : {3, 5, 12}) {
    const ArrayConfig a = ring(n, 2, -1);
    const double z = 2.0 * rayleigh_range(a);
    const double theta = cone_geometry(a, z).theta_k;
    for (Evaluator e : {Evaluator::exact, Evaluator::farfield, Evaluator::series, Evaluator::continuous}) {
      for (double rho : {5e-6, 8e-4, 1.9e-3}) {
        const double f0 = flux_density(evaluate(e, a, {rho, 0.3, z}), theta);
        const double f1 = flux_density(evaluate(e, a, {rho, 0.3 + 2.0 * pi / n, z}), theta);
        CHECK(std::abs(f0 - f1) <= 1e-12 * f0);
      }
    }
  }
}

TEST_CASE("N=12 ring at 2 z_R has a dark core and a bright ring") {
  const ArrayConfig a = ring(12, 1, -1);
  const double z = 2.0 * rayleigh_range(a);
  const double theta = cone_geometry(a, z).theta_k;
  auto flux = [&](double rho) { return flux_density(farfield_dipole_sum(a, {rho, 0.0, z}), theta); };
  const FieldAmplitudes core = farfield_dipole_sum(a, {0.0, 0.0, z});
  CHECK(core.plus == cplx{});
  CHECK(core.minus == cplx{});
  double best = 0.0;
  double best_rho = 0.0;
  for (int i = 1; i <= 400; ++i) {
    const double rho = 4e-3 * i / 400.0;
    if (flux(rho) > best) {
      best = flux(rho);
      best_rho = rho;
    }
  }
  CHECK(best_rho > 1e-3);
  CHECK(flux(0.0) < 1e-6 * best);
}

TEST_CASE("evaluator names") {
  for (Evaluator e : {Evaluator::exact, Evaluator::farfield, Evaluator::series, Evaluator::continuous}) {
    CHECK(evaluator_from_string(to_string(e)) == e);
  }
  CHECK_THROWS_AS(evaluator_from_string("paraxial"), DomainError);
}
