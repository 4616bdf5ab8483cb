#pragma once

// Exact pointer statistics for a pre- and postselected measurement coupled
// through H_int = -g(t) lambda q A, plus the weak-coupling closed forms.

#include <complex>
#include <cstddef>
#include <vector>

#include "weakmeter/probe_model.hpp"
#include "weakmeter/quantum_core.hpp"

namespace weakmeter {

struct MeasurementSetup {
  SystemState pre;       // preselected state, already evolved to the interaction
  SystemState post;      // postselected state, evolved back to the interaction
  ObservableOp observable;
  GaussianProbe probe;
  CouplingWindow window;
  double lambda;
};

// Dimensions agree, probe and window valid, lambda finite and nonzero.
void validate(const MeasurementSetup& setup);

// Uniform grid over the pointer momentum.
struct PointerGrid {
  double p_min = -1.0;
  double p_max = 1.0;
  std::size_t n_points = 4001;

  double step() const { return (p_max - p_min) / static_cast<double>(n_points - 1); }
  double at(std::size_t i) const { return p_min + step() * static_cast<double>(i); }
};

inline constexpr std::size_t kDefaultGridPoints = 4001;
inline constexpr double kDefaultGridWidth = 8.0;     // half-width in units of delta_P
inline constexpr double kRequiredGridWidth = 6.0;    // minimal coverage accepted
inline constexpr double kOverlapFloor = 1e-10;       // |<post|pre>| below this: weak value undefined
inline constexpr double kPostselectionFloor = 1e-12; // probability below this: error

// Symmetric grid of half-width kDefaultGridWidth * delta_P + |lambda| max|a|.
PointerGrid default_grid(const MeasurementSetup& setup);

// n_points >= 101 and odd, p_min < p_max, and the grid covers
// [-(6 dP + |lambda| max|a|), 6 dP + |lambda| max|a|].
void validate(const PointerGrid& grid, const MeasurementSetup& setup);

struct WeakValueReport {
  std::complex<double> A_w;        // <post|A|pre> / <post|pre>
  std::complex<double> A2_w;       // <post|A^2|pre> / <post|pre>
  std::complex<double> DeltaA2_w;  // A2_w - A_w^2
  double overlap = 0.0;            // |<post|pre>|^2
};

WeakValueReport weak_value(const SystemState& pre, const SystemState& post, const ObservableOp& obs,
                           double overlap_floor = kOverlapFloor);

// Joint density P(p, S_f | rho, S_i) of pointer outcome p and successful
// postselection.
double joint_density(const MeasurementSetup& setup, double p);

struct PointerDistribution {
  PointerGrid grid;
  std::vector<double> density;            // conditional density, integrates to 1
  double postselection_probability = 0.0; // integral of the joint density
  // Postselection probability at zero coupling is below lambda/delta_p, so
  // the first-order weak-value formulas are not expected to hold.
  bool weak_regime_violated = false;
};

PointerDistribution conditional_distribution(const MeasurementSetup& setup, const PointerGrid& grid);

struct PointerMoments {
  double average = 0.0;   // <p>/lambda
  double variance = 0.0;  // Var(p)/lambda^2
};

PointerMoments pointer_moments(const PointerDistribution& dist, double lambda);

double inferred_average(const MeasurementSetup& setup, const PointerGrid& grid);
double inferred_variance(const MeasurementSetup& setup, const PointerGrid& grid);

// Re A_w - kappa^2 Im A_w.
double weak_average_approx(const WeakValueReport& report, const GaussianProbe& probe,
                           const PhaseMoments& moments);

// dP^2/lambda^2 + (1 - kappa^4)/2 Re DeltaA2_w - kappa^2 Im DeltaA2_w.
double weak_variance_approx(const WeakValueReport& report, const GaussianProbe& probe,
                            const PhaseMoments& moments, double lambda);

// Expectation of V = dH/dp = p/M to first order in lambda.
double velocity_expectation_weak(const WeakValueReport& report, const GaussianProbe& probe,
                                 const PhaseMoments& moments, double lambda);

}  // namespace weakmeter
