#pragma once

// Seeded random scenarios shared by the unit tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "weakmeter/measurement_engine.hpp"
#include "weakmeter/quantum_core.hpp"
#include "weakmeter/spin_analytic.hpp"

namespace fixtures {

inline constexpr std::uint64_t kSeed = 20261018;
inline constexpr double kPi = std::numbers::pi;

class Rng {
 public:
  explicit Rng(std::uint64_t seed = kSeed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }

  weakmeter::CVector complex_vector(std::size_t d) {
    weakmeter::CVector v(d);
    for (auto& x : v) x = {normal(), normal()};
    return v;
  }

  weakmeter::SystemState state(std::size_t d) { return weakmeter::SystemState::normalized(complex_vector(d)); }

  weakmeter::CMatrix hermitian(std::size_t d) {
    weakmeter::CMatrix m(d);
    for (std::size_t r = 0; r < d; ++r) {
      m(r, r) = normal();
      for (std::size_t c = r + 1; c < d; ++c) {
        m(r, c) = {normal(), normal()};
        m(c, r) = std::conj(m(r, c));
      }
    }
    return m;
  }

  // Geometry away from the poles of theta.
  weakmeter::SpinGeometry geometry() {
    return {uniform(0.2, kPi - 0.2), uniform(0.0, 2.0 * kPi), uniform(0.0, kPi)};
  }

  // Probe with delta_p <= delta_P and optionally a finite linear phase.
  weakmeter::GaussianProbe probe(bool finite_phase) {
    weakmeter::GaussianProbe p;
    p.delta_P = uniform(0.5, 2.0);
    p.delta_p = p.delta_P * uniform(0.3, 1.0);
    p.p_phi = finite_phase ? uniform(2.0, 20.0) * (index(2) ? 1.0 : -1.0) : weakmeter::kInfinity;
    p.mass = uniform(0.5, 3.0);
    p.hbar = uniform(0.5, 2.0);
    return p;
  }

  weakmeter::CouplingWindow window() {
    if (index(4) == 0) return {weakmeter::WindowKind::instantaneous, 0.0, uniform(0.0, 1.0)};
    return {weakmeter::WindowKind::rectangular, uniform(0.1, 2.0), uniform(0.0, 1.0)};
  }

 private:
  std::mt19937_64 gen_;
};

// Window of rectangular shape with T chosen so that kappa^2 takes a target value.
inline weakmeter::CouplingWindow window_for_kappa_sq(const weakmeter::GaussianProbe& probe, double kappa_sq) {
  if (kappa_sq == 0.0) return {weakmeter::WindowKind::instantaneous, 0.0, 0.0};
  // kappa^2 = 2 delta_P^2 m1 / (hbar M) with m1 = T / 2.
  const double T = kappa_sq * probe.hbar * probe.mass / (probe.delta_P * probe.delta_P);
  return {weakmeter::WindowKind::rectangular, T, 0.0};
}

inline weakmeter::MeasurementSetup spin_setup(const weakmeter::SpinGeometry& g, const weakmeter::GaussianProbe& probe,
                                              const weakmeter::CouplingWindow& window, double lambda) {
  auto st = weakmeter::spin_states(g);
  return {std::move(st.pre), std::move(st.post), std::move(st.observable), probe, window, lambda};
}

inline weakmeter::SpinScenario spin_scenario(const weakmeter::SpinGeometry& g, const weakmeter::GaussianProbe& probe,
                                             const weakmeter::CouplingWindow& window, double lambda) {
  return {g, probe, weakmeter::coupling_moments(window), lambda};
}

}  // namespace fixtures
