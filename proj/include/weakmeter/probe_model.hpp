#pragma once

// Mixed Gaussian probe with quadratic free Hamiltonian H_p = p^2 / 2M.
//
// Density matrix in the momentum basis:
//   rho(p, p') = exp{-[(p+p')^2/8 dP^2 + (p-p')^2/8 dp^2 - i (p-p')/2 p_phi]} / (sqrt(2 pi) dP)
// with dP the spread, dp the coherence scale and p_phi the linear-phase scale.

#include <complex>
#include <limits>

namespace weakmeter {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct GaussianProbe {
  double delta_P = 1.0;     // momentum spread
  double delta_p = 1.0;     // coherence scale, <= delta_P
  double p_phi = kInfinity; // linear-phase scale; infinity means no phase
  double mass = 1.0;
  double hbar = 1.0;

  // 1/p_phi, zero for the infinite sentinel.
  double inv_p_phi() const;
};

// Throws InvalidProbeError when delta_p > delta_P, ValidationError on a
// nonpositive or non-finite scale or p_phi == 0.
void validate(const GaussianProbe& probe);

enum class WindowKind { instantaneous, rectangular };

// Coupling profile g(t). Rectangular: g = 1/T on [T_i, T_i + T].
// prep_lead is the free-evolution time between probe preparation and T_i.
struct CouplingWindow {
  WindowKind kind = WindowKind::rectangular;
  double duration = 1.0;
  double prep_lead = 0.0;
};

void validate(const CouplingWindow& window);

// Time integrals of h(s) = int_s^{T_f} g over [t_p, T_f]:
// m0 = int 1, m1 = int h (the effective time Delta t), m2 = int h^2.
struct PhaseMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

PhaseMoments coupling_moments(const CouplingWindow& window);

std::complex<double> rho_elem(const GaussianProbe& probe, double p, double p_prime);

// Accumulated free-evolution phase of the probe branch shifted by lambda * a,
// evaluated at final momentum p (radians).
double phase_phi(const GaussianProbe& probe, const PhaseMoments& moments, double lambda, double a,
                 double p);

// G(p) = (2 m1 / hbar) dH/dp - 2 d alpha/dp, alpha the phase of rho.
double g_function(const GaussianProbe& probe, const PhaseMoments& moments, double p);

struct DerivedScales {
  double p_H = kInfinity;  // sqrt(hbar M / 2 m1)
  double kappa_sq = 0.0;   // delta_P^2 / p_H^2
  double nu = 0.0;         // [1/dp^2 + kappa^4/dP^2]^{-1/2}
  double Q0 = 0.0;         // hbar / (2 p_phi), Wigner-function centre in q
};

DerivedScales derived_scales(const GaussianProbe& probe, const PhaseMoments& moments);

// d Var q / dt at the start of the interaction, hbar kappa^2 / M.
double beta(const GaussianProbe& probe, const PhaseMoments& moments);

}  // namespace weakmeter
