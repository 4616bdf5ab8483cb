#include "weakmeter/probe_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "weakmeter/errors.hpp"

namespace weakmeter {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string("probe: ") + name + " must be positive and finite, got " +
                          std::to_string(v));
  }
}

}  // namespace

double GaussianProbe::inv_p_phi() const { return std::isinf(p_phi) ? 0.0 : 1.0 / p_phi; }

void validate(const GaussianProbe& probe) {
  require_positive(probe.delta_P, "delta_P");
  require_positive(probe.delta_p, "delta_p");
  require_positive(probe.mass, "mass");
  require_positive(probe.hbar, "hbar");
  if (std::isnan(probe.p_phi) || probe.p_phi == 0.0 || probe.p_phi == -kInfinity) {
    throw ValidationError("probe: p_phi must be nonzero (or +inf for no linear phase)");
  }
  if (probe.delta_p > probe.delta_P) {
    throw InvalidProbeError("probe: coherence scale delta_p = " + std::to_string(probe.delta_p) +
                            " exceeds spread delta_P = " + std::to_string(probe.delta_P) +
                            "; density matrix is not positive semidefinite");
  }
}

void validate(const CouplingWindow& window) {
  if (!(window.prep_lead >= 0.0) || !std::isfinite(window.prep_lead)) {
    throw ValidationError("window: prep_lead must be finite and >= 0");
  }
  if (window.kind == WindowKind::rectangular &&
      (!(window.duration > 0.0) || !std::isfinite(window.duration))) {
    throw ValidationError("window: rectangular duration T must be positive and finite");
  }
}

PhaseMoments coupling_moments(const CouplingWindow& window) {
  validate(window);
  // h = 1 during the lead, then falls linearly to 0 across a rectangular window.
  const double lead = window.prep_lead;
  if (window.kind == WindowKind::instantaneous) return {lead, lead, lead};
  const double t = window.duration;
  return {lead + t, lead + t / 2.0, lead + t / 3.0};
}

std::complex<double> rho_elem(const GaussianProbe& probe, double p, double p_prime) {
  const double sum = p + p_prime;
  const double diff = p - p_prime;
  const double dP2 = probe.delta_P * probe.delta_P;
  const double dp2 = probe.delta_p * probe.delta_p;
  const double re = -(sum * sum / (8.0 * dP2) + diff * diff / (8.0 * dp2));
  const double im = diff * probe.inv_p_phi() / 2.0;
  return std::polar(std::exp(re), im) / (std::sqrt(2.0 * std::numbers::pi) * probe.delta_P);
}

double phase_phi(const GaussianProbe& probe, const PhaseMoments& m, double lambda, double a, double p) {
  const double shift = lambda * a;
  return (p * p * m.m0 - 2.0 * p * shift * m.m1 + shift * shift * m.m2) /
         (2.0 * probe.hbar * probe.mass);
}

double g_function(const GaussianProbe& probe, const PhaseMoments& m, double p) {
  return 2.0 * m.m1 * p / (probe.hbar * probe.mass) - probe.inv_p_phi();
}

DerivedScales derived_scales(const GaussianProbe& probe, const PhaseMoments& m) {
  DerivedScales s;
  if (m.m1 > 0.0) {
    s.p_H = std::sqrt(probe.hbar * probe.mass / (2.0 * m.m1));
    s.kappa_sq = probe.delta_P * probe.delta_P / (s.p_H * s.p_H);
  }
  const double k4 = s.kappa_sq * s.kappa_sq;
  s.nu = 1.0 / std::sqrt(1.0 / (probe.delta_p * probe.delta_p) + k4 / (probe.delta_P * probe.delta_P));
  s.Q0 = probe.hbar * probe.inv_p_phi() / 2.0;
  return s;
}

double beta(const GaussianProbe& probe, const PhaseMoments& moments) {
  return probe.hbar * derived_scales(probe, moments).kappa_sq / probe.mass;
}

}  // namespace weakmeter
