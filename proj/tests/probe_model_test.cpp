#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "weakmeter/errors.hpp"
#include "weakmeter/probe_model.hpp"

using namespace weakmeter;
using doctest::Approx;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

GaussianProbe probe(double dP, double dp, double p_phi = kInfinity) {
  GaussianProbe p;
  p.delta_P = dP;
  p.delta_p = dp;
  p.p_phi = p_phi;
  return p;
}

}  // namespace

TEST_CASE("probe validation") {
  CHECK_NOTHROW(validate(probe(1.0, 1.0)));
  CHECK_NOTHROW(validate(probe(1.0, 0.3)));
  CHECK_NOTHROW(validate(probe(1.0, 0.3, -4.0)));
  CHECK_THROWS_AS(validate(probe(1.0, 2.0)), InvalidProbeError);
  CHECK_THROWS_AS(validate(probe(0.0, 0.0)), ValidationError);
  CHECK_THROWS_AS(validate(probe(1.0, -0.5)), ValidationError);
  CHECK_THROWS_AS(validate(probe(1.0, 0.5, 0.0)), ValidationError);
  CHECK_THROWS_AS(validate(probe(1.0, 0.5, std::nan(""))), ValidationError);
  GaussianProbe heavy = probe(1.0, 1.0);
  heavy.mass = 0.0;
  CHECK_THROWS_AS(validate(heavy), ValidationError);
}

TEST_CASE("density matrix elements") {
  const GaussianProbe p = probe(1.3, 0.4, 2.5);
  CHECK(rho_elem(p, 0.0, 0.0).real() == Approx(1.0 / (kSqrt2Pi * 1.3)));
  CHECK(rho_elem(p, 0.0, 0.0).imag() == 0.0);

  const double trace = oracle::simpson([&](double x) { return rho_elem(p, x, x).real(); }, -15.0, 15.0, 4000);
  CHECK(trace == Approx(1.0).epsilon(1e-10));

  // trapezoid over a +-8 delta_P grid with 4001 points
  const double L = 8.0 * p.delta_P, h = 2.0 * L / 4000.0;
  double trap = 0.0;
  for (int i = 0; i <= 4000; ++i) trap += (i == 0 || i == 4000 ? 0.5 : 1.0) * rho_elem(p, -L + h * i, -L + h * i).real();
  CHECK(trap * h == Approx(1.0).epsilon(1e-8));

  fixtures::Rng rng;
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-3.0, 3.0), b = rng.uniform(-3.0, 3.0);
    CHECK(std::abs(rho_elem(p, a, b) - std::conj(rho_elem(p, b, a))) < 1e-15);
  }

  // Coherence decays as e^{-1/2} at (dp, -dp) once the spread term is negligible.
  const GaussianProbe wide = probe(1e4, 0.2);
  const double ratio = std::abs(rho_elem(wide, 0.2, -0.2)) / rho_elem(wide, 0.0, 0.0).real();
  CHECK(ratio == Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("coupling moments") {
  const PhaseMoments rect = coupling_moments({WindowKind::rectangular, 1.5, 0.0});
  CHECK(rect.m0 == Approx(1.5));
  CHECK(rect.m1 == Approx(0.75));
  CHECK(rect.m2 == Approx(0.5));

  const PhaseMoments inst = coupling_moments({WindowKind::instantaneous, 0.0, 0.4});
  CHECK(inst.m0 == 0.4);
  CHECK(inst.m1 == 0.4);
  CHECK(inst.m2 == 0.4);

  const oracle::Moments q = oracle::rectangular_moments_by_quadrature(1.0, 2.0);
  const PhaseMoments led = coupling_moments({WindowKind::rectangular, 1.0, 2.0});
  CHECK(led.m1 == Approx(2.5));
  CHECK(led.m0 == Approx(q.m0).epsilon(1e-12));
  CHECK(led.m1 == Approx(q.m1).epsilon(1e-12));
  CHECK(led.m2 == Approx(q.m2).epsilon(1e-12));

  fixtures::Rng rng;
  for (int i = 0; i < 100; ++i) {
    const PhaseMoments m = coupling_moments(rng.window());
    CHECK(m.m2 <= m.m1);
    CHECK(m.m1 <= m.m0);
  }

  CHECK_THROWS_AS(coupling_moments({WindowKind::rectangular, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(coupling_moments({WindowKind::rectangular, 1.0, -1.0}), ValidationError);
}

TEST_CASE("kinetic phase matches quadrature of the momentum history") {
  fixtures::Rng rng;
  for (int i = 0; i < 100; ++i) {
    GaussianProbe p = probe(1.0, 1.0);
    p.mass = rng.uniform(0.5, 3.0);
    p.hbar = rng.uniform(0.5, 2.0);
    const double T = rng.uniform(0.1, 3.0), lead = rng.uniform(0.0, 2.0);
    const double lambda = rng.uniform(-1.0, 1.0), a = rng.uniform(-2.0, 2.0), x = rng.uniform(-4.0, 4.0);
    const double expected = oracle::kinetic_phase_by_quadrature(x, lambda * a, T, lead, p.hbar, p.mass);
    const double got = phase_phi(p, coupling_moments({WindowKind::rectangular, T, lead}), lambda, a, x);
    CHECK(got == Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("phase examples") {
  const GaussianProbe p = probe(1.0, 1.0);
  const PhaseMoments m = coupling_moments({WindowKind::rectangular, 2.0, 0.0});
  // no coupling: only the free term survives
  CHECK(phase_phi(p, m, 0.0, 1.0, 1.5) == Approx(1.5 * 1.5 * 2.0 / 2.0));
  CHECK(phase_phi(p, m, 0.0, 1.0, 1.5) == phase_phi(p, m, 0.0, -1.0, 1.5));
  CHECK(phase_phi(p, PhaseMoments{}, 0.3, 1.0, 1.5) == 0.0);
  // spin: the difference between the two branches is linear in p, free of m2
  const double x = 0.8, lambda = 0.05;
  const double diff = phase_phi(p, m, lambda, 1.0, x) - phase_phi(p, m, lambda, -1.0, x);
  CHECK(diff == Approx(-2.0 * x * lambda * m.m1 / (p.hbar * p.mass)).epsilon(1e-12));
}

TEST_CASE("phase gradient function") {
  const PhaseMoments m = coupling_moments({WindowKind::rectangular, 1.0, 0.0});
  CHECK(g_function(probe(1.0, 1.0), m, 0.0) == 0.0);
  CHECK(g_function(probe(1.0, 1.0, 4.0), m, 0.0) == Approx(-0.25));
  CHECK(g_function(probe(1.0, 1.0), m, 2.0) == Approx(2.0));

  // Mean of p G(p) over the diagonal equals kappa^2.
  fixtures::Rng rng;
  for (int i = 0; i < 10; ++i) {
    GaussianProbe gp = probe(rng.uniform(0.5, 2.0), 0.3, rng.uniform(1.0, 5.0));
    gp.mass = rng.uniform(0.5, 2.0);
    const PhaseMoments mm = coupling_moments({WindowKind::rectangular, rng.uniform(0.1, 2.0), 0.0});
    const double L = 12.0 * gp.delta_P;
    const double mean = oracle::simpson(
        [&](double x) { return x * g_function(gp, mm, x) * rho_elem(gp, x, x).real(); }, -L, L, 20000);
    CHECK(mean == Approx(derived_scales(gp, mm).kappa_sq).epsilon(1e-8));
  }
}

TEST_CASE("derived scales") {
  // delta_p = delta_P = p_H: kappa^2 = 1 and nu = delta_p / sqrt 2
  const GaussianProbe p = probe(1.0, 1.0);
  const PhaseMoments m = coupling_moments({WindowKind::rectangular, 1.0, 0.0});
  const DerivedScales s = derived_scales(p, m);
  CHECK(s.p_H == Approx(1.0));
  CHECK(s.kappa_sq == Approx(1.0));
  CHECK(s.nu == Approx(1.0 / std::sqrt(2.0)));
  CHECK(s.Q0 == 0.0);

  const DerivedScales none = derived_scales(probe(1.0, 0.7), PhaseMoments{});
  CHECK(std::isinf(none.p_H));
  CHECK(none.kappa_sq == 0.0);
  CHECK(none.nu == Approx(0.7));

  fixtures::Rng rng;
  for (int i = 0; i < 50; ++i) {
    const GaussianProbe gp = rng.probe(true);
    const PhaseMoments mm = coupling_moments(rng.window());
    const DerivedScales d = derived_scales(gp, mm);
    CHECK(d.kappa_sq == Approx(2.0 * gp.delta_P * gp.delta_P * mm.m1 / (gp.hbar * gp.mass)).epsilon(1e-12));
    CHECK(d.nu <= gp.delta_P / std::sqrt(1.0 + d.kappa_sq * d.kappa_sq) * (1.0 + 1e-12));
    CHECK(d.Q0 == Approx(gp.hbar / (2.0 * gp.p_phi)));
  }
}

TEST_CASE("beta") {
  const GaussianProbe p = probe(1.0, 1.0);
  CHECK(beta(p, coupling_moments({WindowKind::rectangular, 1.0, 0.0})) == Approx(1.0));
  CHECK(beta(p, PhaseMoments{}) == 0.0);
  GaussianProbe q = p;
  q.hbar = 2.0;
  q.mass = 4.0;
  const PhaseMoments m = coupling_moments({WindowKind::rectangular, 1.0, 0.0});
  CHECK(beta(q, m) == Approx(q.hbar * derived_scales(q, m).kappa_sq / q.mass));
}
