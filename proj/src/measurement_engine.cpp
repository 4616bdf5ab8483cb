#include "weakmeter/measurement_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "weakmeter/errors.hpp"

namespace weakmeter {

namespace {

constexpr double kResidueTol = 1e-12;

// Precomputed pieces of the double sum over eigenvalue pairs (a, a').
class JointKernel {
 public:
  explicit JointKernel(const MeasurementSetup& s)
      : setup_(s), moments_(coupling_moments(s.window)), a_(s.observable.eigenvalues()) {
    const std::size_t d = a_.size();
    weights_.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      const CVector v = s.observable.eigenvector(k);
      weights_[k] = inner(s.post.span(), v) * inner(v, s.pre.span());  // <f|a><a|i>
    }
  }

  double operator()(double p) const {
    const GaussianProbe& probe = setup_.probe;
    const double lambda = setup_.lambda;
    const std::size_t d = a_.size();
    std::complex<double> total = 0.0;
    double magnitude = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (weights_[i] == 0.0) continue;
      const double phi_i = phase_phi(probe, moments_, lambda, a_[i], p);
      for (std::size_t j = 0; j < d; ++j) {
        if (weights_[j] == 0.0) continue;
        const double phi_j = phase_phi(probe, moments_, lambda, a_[j], p);
        const std::complex<double> term = rho_elem(probe, p - lambda * a_[i], p - lambda * a_[j]) *
                                          std::polar(1.0, -(phi_i - phi_j)) * weights_[i] *
                                          std::conj(weights_[j]);
        total += term;
        magnitude += std::abs(term);
      }
    }
    if (std::abs(total.imag()) > kResidueTol * magnitude) {
      throw NumericAssertionError("joint_density: imaginary residue " + std::to_string(total.imag()) +
                                  " at p = " + std::to_string(p));
    }
    if (total.real() < 0.0) {
      if (total.real() < -kResidueTol * magnitude) {
        throw NumericAssertionError("joint_density: negative density " + std::to_string(total.real()) +
                                    " at p = " + std::to_string(p));
      }
      return 0.0;
    }
    return total.real();
  }

 private:
  const MeasurementSetup& setup_;
  PhaseMoments moments_;
  const std::vector<double>& a_;
  std::vector<std::complex<double>> weights_;
};

double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double acc = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) acc += f[i];
  return acc * h;
}

double coverage(const MeasurementSetup& setup, double width) {
  return width * setup.probe.delta_P + std::abs(setup.lambda) * setup.observable.max_abs_eigenvalue();
}

}  // namespace

void validate(const MeasurementSetup& setup) {
  const std::size_t d = setup.observable.dim();
  if (setup.pre.dim() != d || setup.post.dim() != d) {
    throw ValidationError("setup: state and observable dimensions differ");
  }
  validate(setup.probe);
  validate(setup.window);
  if (!(setup.lambda != 0.0) || !std::isfinite(setup.lambda)) {
    throw ValidationError("setup: coupling lambda must be finite and nonzero");
  }
}

PointerGrid default_grid(const MeasurementSetup& setup) {
  const double half = coverage(setup, kDefaultGridWidth);
  return {-half, half, kDefaultGridPoints};
}

void validate(const PointerGrid& grid, const MeasurementSetup& setup) {
  if (grid.n_points < 101 || grid.n_points % 2 == 0) {
    throw ValidationError("grid: n_points must be odd and >= 101, got " + std::to_string(grid.n_points));
  }
  if (!(grid.p_min < grid.p_max) || !std::isfinite(grid.p_min) || !std::isfinite(grid.p_max)) {
    throw ValidationError("grid: require finite p_min < p_max");
  }
  const double need = coverage(setup, kRequiredGridWidth);
  if (grid.p_min > -need || grid.p_max < need) {
    throw ValidationError("grid: must cover [-" + std::to_string(need) + ", " + std::to_string(need) +
                          "] (6 delta_P + |lambda| max|a|)");
  }
}

WeakValueReport weak_value(const SystemState& pre, const SystemState& post, const ObservableOp& obs,
                           double overlap_floor) {
  if (pre.dim() != obs.dim() || post.dim() != obs.dim()) {
    throw ValidationError("weak_value: dimension mismatch");
  }
  const std::complex<double> amp = inner(post.span(), pre.span());
  if (std::abs(amp) < overlap_floor) {
    throw OrthogonalPostselectionError("weak value undefined: |<post|pre>| = " +
                                       std::to_string(std::abs(amp)) + " below floor");
  }
  const CVector a_pre = obs.matrix().apply(pre.span());
  const CVector aa_pre = obs.matrix().apply(a_pre);
  WeakValueReport r;
  r.A_w = inner(post.span(), a_pre) / amp;
  r.A2_w = inner(post.span(), aa_pre) / amp;
  r.DeltaA2_w = r.A2_w - r.A_w * r.A_w;
  r.overlap = std::norm(amp);
  return r;
}

double joint_density(const MeasurementSetup& setup, double p) {
  validate(setup);
  return JointKernel(setup)(p);
}

PointerDistribution conditional_distribution(const MeasurementSetup& setup, const PointerGrid& grid) {
  validate(setup);
  validate(grid, setup);
  const JointKernel kernel(setup);

  PointerDistribution dist;
  dist.grid = grid;
  dist.density.resize(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) dist.density[i] = kernel(grid.at(i));

  const double prob = trapezoid(dist.density, grid.step());
  if (!(prob >= kPostselectionFloor)) {
    throw VanishingPostselectionError(
        "postselection probability " + std::to_string(prob) + " below floor 1e-12", prob);
  }
  for (double& v : dist.density) v /= prob;
  dist.postselection_probability = prob;

  const double overlap = std::norm(inner(setup.post.span(), setup.pre.span()));
  dist.weak_regime_violated = overlap < std::abs(setup.lambda) / setup.probe.delta_p;
  return dist;
}

PointerMoments pointer_moments(const PointerDistribution& dist, double lambda) {
  const PointerGrid& g = dist.grid;
  std::vector<double> f(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i) f[i] = g.at(i) * dist.density[i];
  const double mean_p = trapezoid(f, g.step());
  for (std::size_t i = 0; i < g.n_points; ++i) {
    const double dev = g.at(i) - mean_p;
    f[i] = dev * dev * dist.density[i];
  }
  const double var_p = trapezoid(f, g.step());
  return {mean_p / lambda, var_p / (lambda * lambda)};
}

double inferred_average(const MeasurementSetup& setup, const PointerGrid& grid) {
  return pointer_moments(conditional_distribution(setup, grid), setup.lambda).average;
}

double inferred_variance(const MeasurementSetup& setup, const PointerGrid& grid) {
  return pointer_moments(conditional_distribution(setup, grid), setup.lambda).variance;
}

double weak_average_approx(const WeakValueReport& report, const GaussianProbe& probe,
                           const PhaseMoments& moments) {
  const double k2 = derived_scales(probe, moments).kappa_sq;
  return report.A_w.real() - k2 * report.A_w.imag();
}

double weak_variance_approx(const WeakValueReport& report, const GaussianProbe& probe,
                            const PhaseMoments& moments, double lambda) {
  const double k2 = derived_scales(probe, moments).kappa_sq;
  const double spread = probe.delta_P / lambda;
  return spread * spread + 0.5 * (1.0 - k2 * k2) * report.DeltaA2_w.real() - k2 * report.DeltaA2_w.imag();
}

double velocity_expectation_weak(const WeakValueReport& report, const GaussianProbe& probe,
                                 const PhaseMoments& moments, double lambda) {
  // <V>_p = 0 for the zero-mean probe; <dV/dp>_p = 1/M.
  return lambda * report.A_w.real() / probe.mass -
         lambda * beta(probe, moments) * report.A_w.imag() / probe.hbar;
}

}  // namespace weakmeter
