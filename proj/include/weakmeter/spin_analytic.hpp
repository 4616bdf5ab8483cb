#pragma once

// Closed forms for a spin-1/2 measured along n, preselected up along n_i and
// postselected up along n_f.
//
// Gauge: n_i = z, n = (sin theta, 0, cos theta),
//        n_f = (sin gamma cos phi, sin gamma sin phi, cos gamma).
// gamma is the polar angle of n_f (range [0, 2 pi]) and phi its azimuth
// (range [0, pi]); the ranges are swapped relative to the usual spherical
// convention so that gamma sweeps a full great circle.

#include <complex>
#include <string_view>

#include "weakmeter/probe_model.hpp"
#include "weakmeter/quantum_core.hpp"

namespace weakmeter {

struct SpinGeometry {
  double theta = 0.0;
  double gamma = 0.0;
  double phi = 0.0;

  Vec3 n() const;
  Vec3 n_i() const;
  Vec3 n_f() const;
};

void validate(const SpinGeometry& geom);

struct SpinScenario {
  SpinGeometry geometry;
  GaussianProbe probe;
  PhaseMoments moments;
  double lambda = 0.01;
};

void validate(const SpinScenario& sc);

// Pre/postselected spinors and n . sigma for the generic engine.
struct SpinStates {
  SystemState pre;
  SystemState post;
  ObservableOp observable;
};

SpinStates spin_states(const SpinGeometry& geom);

// cos theta + sin theta e^{-i phi} tan(gamma/2); throws
// OrthogonalPostselectionError at gamma = pi.
std::complex<double> spin_weak_value(const SpinGeometry& geom);

// n . [n_i + n_f + i n_i x n_f] / (1 + n_i . n_f)
std::complex<double> spin_weak_value(const Vec3& n, const Vec3& n_i, const Vec3& n_f);

// Normalizer N; twice the postselection probability.
double normalizer(const SpinScenario& sc);

// Conditional pointer density at p.
double conditional_pdf_spin(const SpinScenario& sc, double p);

// <A> = <p>/lambda, exact in lambda.
double exact_average_spin(const SpinScenario& sc);

// <p^2>/lambda^2 - <A>^2, exact in lambda. Obtained from the same Gaussian
// moments as exact_average_spin, one order higher.
double exact_variance_spin(const SpinScenario& sc);

enum class Branch { upper, lower };

enum class ExtremumRegime {
  phase_negligible,  // p_phi >> nu
  weak_dynamics,     // kappa^2 << 1
  general,           // eps(phi) >> lambda/p_phi, lambda/nu
  far_from_pi,       // upper branch, eps(phi) -> 0
  lower_limit,       // lower branch, eps(phi) -> 0
  numeric,           // brute-force sweep of exact_average_spin
};

std::string_view to_string(ExtremumRegime r);

struct ExtremumResult {
  double gamma_star = 0.0;
  double A_m = 0.0;
  ExtremumRegime regime = ExtremumRegime::numeric;
  bool analytic() const { return regime != ExtremumRegime::numeric; }
};

// eps(phi) = cos phi + kappa^2 sin phi and its derivative.
double epsilon_phi(double phi, double kappa_sq);
double epsilon_phi_prime(double phi, double kappa_sq);

// Extremum of <A>(gamma) at fixed theta, phi. The upper branch is the
// positive-sign root (a maximum for lambda > 0), the lower branch the other.
// Throws DegenerateGeometryError for theta in {0, pi}.
ExtremumResult extremum(const SpinScenario& sc, Branch branch);

// Pieces used by extremum, exposed for testing.
struct GammaExtremum {
  double gamma_star;
  double A_m;
};
GammaExtremum extremum_general(const SpinScenario& sc, Branch branch);
// sin(gamma*) of the far extremum when eps(phi) is small.
double far_extremum_sin_gamma(const SpinScenario& sc);
// Brute-force sweep of exact_average_spin over gamma in [0, 2 pi].
GammaExtremum extremum_numeric(const SpinScenario& sc, Branch branch, std::size_t n_points = 100001);

struct SpreadExtrema {
  double min = 0.0;
  double max = 0.0;
  double min_gamma_lo = 0.0;  // pi - sqrt(3) sin theta lambda / nu
  double min_gamma_hi = 0.0;  // pi + sqrt(3) sin theta lambda / nu
  double min_phi = 0.0;       // arctan(kappa^2)
  double max_gamma = 0.0;     // pi
};

// Extrema of the pointer variance over (gamma, phi) for p_phi >= 10 nu;
// RegimeNotApplicableError otherwise.
SpreadExtrema spread_extrema(const SpinScenario& sc);

}  // namespace weakmeter
