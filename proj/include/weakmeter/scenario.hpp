#pragma once

// Spin scenario runner behind the weakmeter CLI: INI-style configuration,
// sweeps, pointer distributions and extremum reports, written as CSV.

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "weakmeter/measurement_engine.hpp"
#include "weakmeter/probe_model.hpp"
#include "weakmeter/spin_analytic.hpp"

namespace weakmeter {

enum class SweepVariable { gamma, phi, lambda };

std::string_view to_string(SweepVariable v);

struct SweepSpec {
  SweepVariable variable = SweepVariable::gamma;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  double value(std::size_t i) const;
};

struct GridSpec {
  bool automatic = true;
  double p_min = 0.0;
  double p_max = 0.0;
  std::size_t n_points = kDefaultGridPoints;
};

struct ScenarioConfig {
  SpinGeometry geometry;
  GaussianProbe probe;
  CouplingWindow window;
  double lambda = 0.0;
  GridSpec grid;
  std::optional<SweepSpec> sweep;  // empty: single-point evaluation
};

// section -> key -> raw value
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

// Parses `[section]` headers and `key = value` lines; '#' and ';' start comments.
RawConfig parse_ini(std::string_view text);

// Applies "section.key=value".
void apply_override(RawConfig& raw, std::string_view assignment);

struct ParseOptions {
  bool degrees = false;  // angles (and angle sweeps) given in degrees
};

// Validates every key and value; throws ConfigError naming section, key and
// the violated constraint.
ScenarioConfig build_config(const RawConfig& raw, const ParseOptions& opts = {});

ScenarioConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {},
                            const ParseOptions& opts = {});

// Config with the sweep variable set to `value`.
ScenarioConfig at_sweep_value(const ScenarioConfig& cfg, double value);

SpinScenario to_spin_scenario(const ScenarioConfig& cfg);
MeasurementSetup to_measurement_setup(const ScenarioConfig& cfg);
PointerGrid resolve_grid(const ScenarioConfig& cfg, const MeasurementSetup& setup);

struct SweepRow {
  double value = 0.0;
  std::optional<double> exact_average;
  std::optional<double> approx_average;
  std::optional<double> re_weak_value;
  std::optional<double> im_weak_value;
  std::optional<double> exact_variance;
  std::optional<double> approx_variance;
  std::optional<double> postselection_probability;
  std::vector<std::string> flags;
};

// Evaluates a single point through the generic engine and the weak-value
// formulas. Domain failures become flags.
SweepRow evaluate_point(const ScenarioConfig& cfg, double value);

// One row per sweep step (or one row without a sweep), ordered by index.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, unsigned jobs = 1);

struct DistributionRow {
  double p;
  double density;
  double closed_form;
};

struct DistributionTable {
  std::vector<DistributionRow> rows;
  double postselection_probability = 0.0;
  bool weak_regime_violated = false;
};

DistributionTable run_distribution(const ScenarioConfig& cfg);

struct ExtremaRow {
  std::string quantity;  // A_upper, A_lower, var_min, var_max
  double gamma = 0.0;
  double phi = 0.0;
  double value = 0.0;
  std::string label;     // analytic | numeric
  std::string regime;
  double numeric_gamma = 0.0;
  double numeric_phi = 0.0;
  double numeric_value = 0.0;
};

std::vector<ExtremaRow> run_extrema(const ScenarioConfig& cfg);

// 17 significant digits, so values re-parse exactly; empty for missing or
// non-finite values.
std::string format_number(std::optional<double> v);

void write_sweep_csv(std::ostream& os, const ScenarioConfig& cfg, const std::vector<SweepRow>& rows,
                     bool compare);
void write_distribution_csv(std::ostream& os, const DistributionTable& table);
void write_extrema_csv(std::ostream& os, const std::vector<ExtremaRow>& rows);

}  // namespace weakmeter
