#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "weakmeter/errors.hpp"
#include "weakmeter/scenario.hpp"

namespace weakmeter {

namespace {

constexpr double kPi = std::numbers::pi;

struct VarianceSearch {
  double gamma;
  double phi;
  double value;
};

// Brute-force extremum of exact_variance_spin over (gamma, phi), refined on a
// finer local grid. sign = +1 finds the maximum, -1 the minimum.
VarianceSearch search_variance(SpinScenario sc, double sign) {
  auto eval = [&](double g, double f) {
    sc.geometry.gamma = g;
    sc.geometry.phi = f;
    try {
      return sign * exact_variance_spin(sc);
    } catch (const VanishingPostselectionError&) {
      return -kInfinity;
    }
  };
  auto scan = [&](double g_lo, double g_hi, std::size_t ng, double f_lo, double f_hi, std::size_t nf) {
    VarianceSearch best{g_lo, f_lo, -kInfinity};
    for (std::size_t j = 0; j < nf; ++j) {
      const double f = f_lo + (f_hi - f_lo) * static_cast<double>(j) / static_cast<double>(nf - 1);
      for (std::size_t i = 0; i < ng; ++i) {
        const double g = g_lo + (g_hi - g_lo) * static_cast<double>(i) / static_cast<double>(ng - 1);
        const double v = eval(g, f);
        if (v > best.value) best = {g, f, v};
      }
    }
    return best;
  };
  constexpr std::size_t ng = 4001, nf = 181;
  const double dg = 2.0 * kPi / (ng - 1), df = kPi / (nf - 1);
  VarianceSearch best = scan(0.0, 2.0 * kPi, ng, 0.0, kPi, nf);
  for (int pass = 0; pass < 3; ++pass) {
    const double scale = std::pow(0.05, pass);
    const double hg = dg * scale, hf = df * scale;
    best = scan(std::max(0.0, best.gamma - hg), std::min(2.0 * kPi, best.gamma + hg), 41,
                std::max(0.0, best.phi - hf), std::min(kPi, best.phi + hf), 41);
  }
  best.value *= sign;
  return best;
}

}  // namespace

ScenarioConfig at_sweep_value(const ScenarioConfig& cfg, double value) {
  ScenarioConfig out = cfg;
  if (!cfg.sweep) return out;
  switch (cfg.sweep->variable) {
    case SweepVariable::gamma: out.geometry.gamma = value; break;
    case SweepVariable::phi: out.geometry.phi = value; break;
    case SweepVariable::lambda: out.lambda = value; break;
  }
  return out;
}

SpinScenario to_spin_scenario(const ScenarioConfig& cfg) {
  return {cfg.geometry, cfg.probe, coupling_moments(cfg.window), cfg.lambda};
}

MeasurementSetup to_measurement_setup(const ScenarioConfig& cfg) {
  SpinStates st = spin_states(cfg.geometry);
  return {std::move(st.pre), std::move(st.post), std::move(st.observable), cfg.probe, cfg.window, cfg.lambda};
}

PointerGrid resolve_grid(const ScenarioConfig& cfg, const MeasurementSetup& setup) {
  if (cfg.grid.automatic) {
    PointerGrid g = default_grid(setup);
    g.n_points = cfg.grid.n_points;
    return g;
  }
  return {cfg.grid.p_min, cfg.grid.p_max, cfg.grid.n_points};
}

SweepRow evaluate_point(const ScenarioConfig& base, double value) {
  const ScenarioConfig cfg = at_sweep_value(base, value);
  SweepRow row;
  row.value = value;

  const MeasurementSetup setup = to_measurement_setup(cfg);
  const PhaseMoments moments = coupling_moments(cfg.window);
  try {
    const PointerDistribution dist = conditional_distribution(setup, resolve_grid(cfg, setup));
    const PointerMoments m = pointer_moments(dist, cfg.lambda);
    row.exact_average = m.average;
    row.exact_variance = m.variance;
    row.postselection_probability = dist.postselection_probability;
    if (dist.weak_regime_violated) row.flags.emplace_back("weak_regime");
  } catch (const VanishingPostselectionError&) {
    row.flags.emplace_back("vanishing_postselection");
  }
  try {
    const WeakValueReport wv = weak_value(setup.pre, setup.post, setup.observable);
    row.re_weak_value = wv.A_w.real();
    row.im_weak_value = wv.A_w.imag();
    row.approx_average = weak_average_approx(wv, cfg.probe, moments);
    row.approx_variance = weak_variance_approx(wv, cfg.probe, moments, cfg.lambda);
  } catch (const OrthogonalPostselectionError&) {
    row.flags.emplace_back("weak_value_undefined");
  }
  return row;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, unsigned jobs) {
  const std::size_t n = cfg.sweep ? cfg.sweep->steps : 1;
  auto value_at = [&](std::size_t i) {
    if (cfg.sweep) return cfg.sweep->value(i);
    return cfg.geometry.gamma;
  };
  std::vector<SweepRow> rows(n);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = evaluate_point(cfg, value_at(i));
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = evaluate_point(cfg, value_at(i));
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

DistributionTable run_distribution(const ScenarioConfig& cfg) {
  const MeasurementSetup setup = to_measurement_setup(cfg);
  const PointerDistribution dist = conditional_distribution(setup, resolve_grid(cfg, setup));
  const SpinScenario sc = to_spin_scenario(cfg);
  DistributionTable table;
  table.postselection_probability = dist.postselection_probability;
  table.weak_regime_violated = dist.weak_regime_violated;
  table.rows.reserve(dist.density.size());
  for (std::size_t i = 0; i < dist.density.size(); ++i) {
    const double p = dist.grid.at(i);
    table.rows.push_back({p, dist.density[i], conditional_pdf_spin(sc, p)});
  }
  return table;
}

std::vector<ExtremaRow> run_extrema(const ScenarioConfig& cfg) {
  const SpinScenario sc = to_spin_scenario(cfg);
  std::vector<ExtremaRow> out;

  for (const Branch branch : {Branch::upper, Branch::lower}) {
    const ExtremumResult r = extremum(sc, branch);
    const GammaExtremum num = extremum_numeric(sc, branch);
    ExtremaRow row;
    row.quantity = branch == Branch::upper ? "A_upper" : "A_lower";
    row.gamma = r.gamma_star;
    row.phi = cfg.geometry.phi;
    row.value = r.A_m;
    row.label = r.analytic() ? "analytic" : "numeric";
    row.regime = std::string(to_string(r.regime));
    row.numeric_gamma = num.gamma_star;
    row.numeric_phi = cfg.geometry.phi;
    row.numeric_value = num.A_m;
    out.push_back(row);
  }

  const VarianceSearch vmin = search_variance(sc, -1.0);
  const VarianceSearch vmax = search_variance(sc, 1.0);
  ExtremaRow lo{"var_min", vmin.gamma, vmin.phi, vmin.value, "numeric", "numeric",
                vmin.gamma, vmin.phi, vmin.value};
  ExtremaRow hi{"var_max", vmax.gamma, vmax.phi, vmax.value, "numeric", "numeric",
                vmax.gamma, vmax.phi, vmax.value};
  try {
    const SpreadExtrema s = spread_extrema(sc);
    lo.gamma = std::abs(vmin.gamma - s.min_gamma_lo) <= std::abs(vmin.gamma - s.min_gamma_hi) ? s.min_gamma_lo
                                                                                                : s.min_gamma_hi;
    lo.phi = s.min_phi;
    lo.value = s.min;
    lo.label = "analytic";
    lo.regime = "phase_negligible";
    hi.gamma = s.max_gamma;
    hi.phi = s.min_phi;
    hi.value = s.max;
    hi.label = "analytic";
    hi.regime = "phase_negligible";
  } catch (const RegimeNotApplicableError&) {
  }
  out.push_back(lo);
  out.push_back(hi);
  return out;
}

std::string format_number(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, *v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& os, const ScenarioConfig& cfg, const std::vector<SweepRow>& rows,
                     bool compare) {
  const std::string_view var = cfg.sweep ? to_string(cfg.sweep->variable) : "gamma";
  os << var << ",exact_A,approx_A,re_Aw,im_Aw,exact_var,approx_var,postselection_probability";
  if (compare) os << ",error_A,error_var";
  os << ",flags\n";
  for (const SweepRow& r : rows) {
    os << format_number(r.value) << ',' << format_number(r.exact_average) << ','
       << format_number(r.approx_average) << ',' << format_number(r.re_weak_value) << ','
       << format_number(r.im_weak_value) << ',' << format_number(r.exact_variance) << ','
       << format_number(r.approx_variance) << ',' << format_number(r.postselection_probability);
    if (compare) {
      auto diff = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
        if (a && b) return *a - *b;
        return std::nullopt;
      };
      os << ',' << format_number(diff(r.exact_average, r.approx_average)) << ','
         << format_number(diff(r.exact_variance, r.approx_variance));
    }
    os << ',';
    for (std::size_t i = 0; i < r.flags.size(); ++i) os << (i ? ";" : "") << r.flags[i];
    os << '\n';
  }
}

void write_distribution_csv(std::ostream& os, const DistributionTable& table) {
  os << "p,density,closed_form\n";
  for (const auto& r : table.rows) {
    os << format_number(r.p) << ',' << format_number(r.density) << ',' << format_number(r.closed_form) << '\n';
  }
}

void write_extrema_csv(std::ostream& os, const std::vector<ExtremaRow>& rows) {
  os << "quantity,gamma,phi,value,label,regime,numeric_gamma,numeric_phi,numeric_value\n";
  for (const auto& r : rows) {
    os << r.quantity << ',' << format_number(r.gamma) << ',' << format_number(r.phi) << ','
       << format_number(r.value) << ',' << r.label << ',' << r.regime << ',' << format_number(r.numeric_gamma)
       << ',' << format_number(r.numeric_phi) << ',' << format_number(r.numeric_value) << '\n';
  }
}

}  // namespace weakmeter
