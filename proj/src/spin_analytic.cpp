#include "weakmeter/spin_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "weakmeter/errors.hpp"
#include "weakmeter/measurement_engine.hpp"

namespace weakmeter {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleTol = 1e-12;
constexpr double kNormalizerFloor = 1e-12;
constexpr double kRegimeRatio = 10.0;  // "much larger than"

// Scalar invariants of the three directions.
struct Invariants {
  double a_i;    // n . n_i
  double a_f;    // n . n_f
  double c_if;   // n_i . n_f
  double triple; // n . (n_i x n_f)
  double cross;  // (n x n_i) . (n x n_f)
};

Invariants invariants(const SpinGeometry& g) {
  const Vec3 n = g.n(), ni = g.n_i(), nf = g.n_f();
  return {dot(n, ni), dot(n, nf), dot(ni, nf), dot(n, weakmeter::cross(ni, nf)),
          dot(weakmeter::cross(n, ni), weakmeter::cross(n, nf))};
}

struct Scales {
  double kappa_sq;
  double nu;
  double envelope;  // exp(-lambda^2 / 2 nu^2)
  double b;         // lambda / p_phi
};

Scales scales(const SpinScenario& sc) {
  const DerivedScales d = derived_scales(sc.probe, sc.moments);
  const double x = sc.lambda / d.nu;
  return {d.kappa_sq, d.nu, std::exp(-0.5 * x * x), sc.lambda * sc.probe.inv_p_phi()};
}

double checked_normalizer(const Invariants& v, const Scales& s) {
  const double n = 1.0 + v.c_if + s.envelope * std::sin(s.b) * v.triple -
                   (1.0 - s.envelope * std::cos(s.b)) * v.cross;
  if (!(n >= kNormalizerFloor)) {
    throw VanishingPostselectionError("spin normalizer N = " + std::to_string(n) + " below floor", 0.5 * n);
  }
  return n;
}

void require_nondegenerate(const SpinGeometry& g) {
  if (std::abs(std::sin(g.theta)) < kAngleTol) {
    throw DegenerateGeometryError("theta in {0, pi}: n is parallel to the preselection axis");
  }
}

double wrap_two_pi(double g) {
  g = std::fmod(g, 2.0 * kPi);
  return g < 0.0 ? g + 2.0 * kPi : g;
}

// exact_average_spin at gamma, NaN where N vanishes.
double average_at(SpinScenario sc, double gamma) {
  sc.geometry.gamma = gamma;
  try {
    return exact_average_spin(sc);
  } catch (const VanishingPostselectionError&) {
    return std::nan("");
  }
}

// Orientation so that "upper" always picks the larger value of sign(lambda) <A>.
double branch_sign(const SpinScenario& sc, Branch b) {
  const double s = sc.lambda > 0.0 ? 1.0 : -1.0;
  return b == Branch::upper ? s : -s;
}

}  // namespace

Vec3 SpinGeometry::n() const { return {std::sin(theta), 0.0, std::cos(theta)}; }

Vec3 SpinGeometry::n_i() const { return {0.0, 0.0, 1.0}; }

Vec3 SpinGeometry::n_f() const {
  return {std::sin(gamma) * std::cos(phi), std::sin(gamma) * std::sin(phi), std::cos(gamma)};
}

void validate(const SpinGeometry& g) {
  auto in = [](double v, double hi) { return v >= -kAngleTol && v <= hi + kAngleTol; };
  if (!in(g.theta, kPi)) throw ValidationError("geometry: theta must lie in [0, pi]");
  if (!in(g.gamma, 2.0 * kPi)) throw ValidationError("geometry: gamma must lie in [0, 2 pi]");
  if (!in(g.phi, kPi)) throw ValidationError("geometry: phi must lie in [0, pi]");
}

void validate(const SpinScenario& sc) {
  validate(sc.geometry);
  validate(sc.probe);
  if (!(sc.lambda != 0.0) || !std::isfinite(sc.lambda)) {
    throw ValidationError("scenario: lambda must be finite and nonzero");
  }
}

SpinStates spin_states(const SpinGeometry& geom) {
  return {bloch_to_spinor(Direction(geom.n_i())), bloch_to_spinor(Direction(geom.n_f())),
          spin_observable(Direction(geom.n()))};
}

std::complex<double> spin_weak_value(const SpinGeometry& g) {
  validate(g);
  if (std::abs(std::cos(0.5 * g.gamma)) < kOverlapFloor) {
    throw OrthogonalPostselectionError("spin weak value undefined at gamma = pi");
  }
  return std::cos(g.theta) + std::sin(g.theta) * std::polar(1.0, -g.phi) * std::tan(0.5 * g.gamma);
}

std::complex<double> spin_weak_value(const Vec3& n, const Vec3& n_i, const Vec3& n_f) {
  const double denom = 1.0 + dot(n_i, n_f);
  if (std::abs(denom) < 2.0 * kOverlapFloor * kOverlapFloor) {
    throw OrthogonalPostselectionError("spin weak value undefined: n_f = -n_i");
  }
  const Vec3 c = cross(n_i, n_f);
  return std::complex<double>(dot(n, n_i) + dot(n, n_f), dot(n, c)) / denom;
}

double normalizer(const SpinScenario& sc) {
  validate(sc);
  const Invariants v = invariants(sc.geometry);
  const Scales s = scales(sc);
  return 1.0 + v.c_if + s.envelope * std::sin(s.b) * v.triple - (1.0 - s.envelope * std::cos(s.b)) * v.cross;
}

double conditional_pdf_spin(const SpinScenario& sc, double p) {
  validate(sc);
  const Invariants v = invariants(sc.geometry);
  const Scales s = scales(sc);
  const double n = checked_normalizer(v, s);
  const double dP = sc.probe.delta_P;
  const double lam = sc.lambda;
  const double lg = lam * g_function(sc.probe, sc.moments, p);

  double acc = 0.0;
  for (double sigma : {1.0, -1.0}) {
    const double shifted = p - sigma * lam;
    acc += 0.5 * (1.0 + sigma * v.a_i) * (1.0 + sigma * v.a_f) *
           std::exp(-shifted * shifted / (2.0 * dP * dP));
  }
  const double interference = (v.cross * std::cos(lg) - v.triple * std::sin(lg)) *
                              std::exp(-p * p / (2.0 * dP * dP) -
                                       lam * lam / (2.0 * sc.probe.delta_p * sc.probe.delta_p));
  return (acc + interference) / (std::sqrt(2.0 * kPi) * dP * n);
}

double exact_average_spin(const SpinScenario& sc) {
  validate(sc);
  const Invariants v = invariants(sc.geometry);
  const Scales s = scales(sc);
  const double n = checked_normalizer(v, s);
  return (v.a_i + v.a_f -
          s.kappa_sq * s.envelope * (std::cos(s.b) * v.triple - std::sin(s.b) * v.cross)) /
         n;
}

double exact_variance_spin(const SpinScenario& sc) {
  validate(sc);
  const Invariants v = invariants(sc.geometry);
  const Scales s = scales(sc);
  const double n = checked_normalizer(v, s);
  const double dP2 = sc.probe.delta_P * sc.probe.delta_P;
  const double lam2 = sc.lambda * sc.lambda;
  const double second = ((dP2 + lam2) * (1.0 + v.a_i * v.a_f) +
                         s.envelope * (dP2 - lam2 * s.kappa_sq * s.kappa_sq) *
                             (v.cross * std::cos(s.b) + v.triple * std::sin(s.b))) /
                        n;
  const double mean = exact_average_spin(sc);
  return second / lam2 - mean * mean;
}

std::string_view to_string(ExtremumRegime r) {
  switch (r) {
    case ExtremumRegime::phase_negligible: return "phase_negligible";
    case ExtremumRegime::weak_dynamics: return "weak_dynamics";
    case ExtremumRegime::general: return "general";
    case ExtremumRegime::far_from_pi: return "far_from_pi";
    case ExtremumRegime::lower_limit: return "lower_limit";
    case ExtremumRegime::numeric: return "numeric";
  }
  return "unknown";
}

double epsilon_phi(double phi, double kappa_sq) { return std::cos(phi) + kappa_sq * std::sin(phi); }

double epsilon_phi_prime(double phi, double kappa_sq) { return -std::sin(phi) + kappa_sq * std::cos(phi); }

GammaExtremum extremum_general(const SpinScenario& sc, Branch branch) {
  const Scales s = scales(sc);
  const double phi = sc.geometry.phi;
  const double k2 = s.kappa_sq;
  const double eps = epsilon_phi(phi, k2);
  const double inv_pp = sc.probe.inv_p_phi();
  const double cphi = std::cos(phi);
  const double sign = branch == Branch::upper ? 1.0 : -1.0;
  const double root = std::sqrt(eps * eps / (s.nu * s.nu) + (1.0 + k2 * k2) * cphi * cphi * inv_pp * inv_pp);
  const double eta = sc.lambda * std::sin(sc.geometry.theta) / eps * (k2 * inv_pp + sign * root);
  const double a_m = (eps * eps / sc.lambda) / (cphi * epsilon_phi_prime(phi, k2) * inv_pp + sign * root);
  return {kPi - eta, a_m};
}

double far_extremum_sin_gamma(const SpinScenario& sc) {
  const Scales s = scales(sc);
  const double k2 = s.kappa_sq;
  const double phi = sc.geometry.phi;
  const double st = std::sin(sc.geometry.theta);
  const double q = epsilon_phi(phi, k2) + epsilon_phi_prime(phi, k2) * s.b * std::cos(sc.geometry.theta);
  const double t = k2 * s.b * st;
  return -2.0 * t * q / (t * t + q * q);
}

GammaExtremum extremum_numeric(const SpinScenario& sc, Branch branch, std::size_t n_points) {
  const double orient = branch_sign(sc, branch);
  const double step = 2.0 * kPi / static_cast<double>(n_points - 1);
  std::size_t best = n_points;
  double best_val = -kInfinity;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double a = average_at(sc, step * static_cast<double>(i));
    if (std::isnan(a)) continue;
    if (orient * a > best_val) {
      best_val = orient * a;
      best = i;
    }
  }
  if (best == n_points) {
    throw VanishingPostselectionError("extremum sweep: postselection vanishes everywhere", 0.0);
  }
  // Golden-section refinement inside the bracketing cell pair.
  double lo = std::max(0.0, step * (static_cast<double>(best) - 1.0));
  double hi = std::min(2.0 * kPi, step * (static_cast<double>(best) + 1.0));
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double g) {
    const double a = average_at(sc, g);
    return std::isnan(a) ? -kInfinity : orient * a;
  };
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    }
  }
  const double g_ref = 0.5 * (lo + hi);
  const double v_ref = f(g_ref);
  if (v_ref >= best_val) return {g_ref, orient * v_ref};
  return {step * static_cast<double>(best), orient * best_val};
}

ExtremumResult extremum(const SpinScenario& sc, Branch branch) {
  validate(sc);
  require_nondegenerate(sc.geometry);
  const Scales s = scales(sc);
  const double k2 = s.kappa_sq;
  const double phi = sc.geometry.phi;
  const double st = std::sin(sc.geometry.theta);
  const double eps = epsilon_phi(phi, k2);
  const double lam = sc.lambda;
  const double inv_pp = sc.probe.inv_p_phi();
  const double sign = branch == Branch::upper ? 1.0 : -1.0;
  const double r_nu = std::abs(lam) / s.nu;
  const double r_phase = std::abs(s.b);
  const double scale = std::max(r_nu, r_phase);

  if (std::abs(inv_pp) * kRegimeRatio * s.nu <= 1.0 && std::abs(eps) > kRegimeRatio * r_nu) {
    const double eta = sign * std::copysign(1.0, eps) * st * lam / s.nu;
    return {kPi - eta, sign * std::abs(eps) * s.nu / lam, ExtremumRegime::phase_negligible};
  }
  const double cphi = std::cos(phi);
  const double root = std::sqrt(1.0 / (s.nu * s.nu) + inv_pp * inv_pp);
  if (k2 * kRegimeRatio < 1.0 && std::abs(cphi) > kRegimeRatio * std::abs(lam) * root) {
    const double q = sign * std::copysign(1.0, cphi) * root;
    return {kPi - st * lam * q, cphi / (lam * (q - std::sin(phi) * inv_pp)), ExtremumRegime::weak_dynamics};
  }
  if (std::abs(eps) > kRegimeRatio * scale) {
    const GammaExtremum g = extremum_general(sc, branch);
    return {g.gamma_star, g.A_m, ExtremumRegime::general};
  }
  if (r_phase > 0.0 && std::abs(eps) * kRegimeRatio < scale) {
    if (branch == Branch::upper) {
      const double sg = std::clamp(far_extremum_sin_gamma(sc), -1.0, 1.0);
      const double g1 = wrap_two_pi(std::asin(sg));
      const double g2 = wrap_two_pi(kPi - std::asin(sg));
      const double orient = branch_sign(sc, branch);
      const double a1 = average_at(sc, g1), a2 = average_at(sc, g2);
      if (!std::isnan(a1) || !std::isnan(a2)) {
        const bool first = std::isnan(a2) || (!std::isnan(a1) && orient * a1 >= orient * a2);
        return first ? ExtremumResult{g1, a1, ExtremumRegime::far_from_pi}
                     : ExtremumResult{g2, a2, ExtremumRegime::far_from_pi};
      }
    } else {
      const double k4 = k2 * k2;
      const double eta = lam * st * inv_pp / std::sqrt(1.0 + k4);
      const double a_m = -2.0 * k2 * s.b / (k4 * s.b * s.b / (1.0 + k4) + r_nu * r_nu);
      return {kPi - eta, a_m, ExtremumRegime::lower_limit};
    }
  }
  const GammaExtremum g = extremum_numeric(sc, branch);
  return {g.gamma_star, g.A_m, ExtremumRegime::numeric};
}

SpreadExtrema spread_extrema(const SpinScenario& sc) {
  validate(sc);
  require_nondegenerate(sc.geometry);
  const Scales s = scales(sc);
  if (std::abs(sc.probe.inv_p_phi()) * kRegimeRatio * s.nu > 1.0) {
    throw RegimeNotApplicableError("spread extrema need p_phi >= 10 nu (p_phi = " +
                                   std::to_string(sc.probe.p_phi) + ", nu = " + std::to_string(s.nu) + ")");
  }
  const double dP2 = sc.probe.delta_P * sc.probe.delta_P;
  const double lam2 = sc.lambda * sc.lambda;
  const double w = (1.0 + s.kappa_sq * s.kappa_sq) * s.nu * s.nu;
  const double eta = std::sqrt(3.0) * std::sin(sc.geometry.theta) * std::abs(sc.lambda) / s.nu;
  SpreadExtrema out;
  out.min = (dP2 - 0.25 * w) / lam2;
  out.max = (dP2 + 2.0 * w) / lam2;
  out.min_gamma_lo = kPi - eta;
  out.min_gamma_hi = kPi + eta;
  out.min_phi = std::atan(s.kappa_sq);
  out.max_gamma = kPi;
  return out;
}

}  // namespace weakmeter
