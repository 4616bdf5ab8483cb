#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <system_error>

#include "weakmeter/errors.hpp"
#include "weakmeter/scenario.hpp"

namespace weakmeter {

namespace {

constexpr double kPi = std::numbers::pi;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view section, std::string_view key, const std::string& why) {
  throw ConfigError("[" + std::string(section) + "] " + std::string(key) + ": " + why);
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"geometry", {"theta", "gamma", "phi"}},
      {"probe", {"delta_P", "delta_p", "p_phi", "mass", "hbar"}},
      {"window", {"kind", "T", "prep_lead"}},
      {"coupling", {"lambda"}},
      {"grid", {"p_min", "p_max", "n_points"}},
      {"sweep", {"variable", "start", "stop", "steps"}},
  };
  return s;
}

void check_known(std::string_view section, std::string_view key) {
  const auto it = schema().find(std::string(section));
  if (it == schema().end()) {
    throw ConfigError("unknown section [" + std::string(section) + "]");
  }
  if (!it->second.contains(std::string(key))) fail(section, key, "unknown key");
}

// Reads values from one section and tracks what was consumed.
class SectionReader {
 public:
  SectionReader(const RawConfig& raw, std::string name) : name_(std::move(name)) {
    if (const auto it = raw.find(name_); it != raw.end()) values_ = &it->second;
  }

  bool present() const { return values_ != nullptr; }
  bool empty() const { return values_ == nullptr || values_->empty(); }
  bool has(const std::string& key) const { return values_ && values_->contains(key); }

  const std::string& text(const std::string& key) const {
    if (!has(key)) fail(name_, key, "missing required key");
    return values_->at(key);
  }

  double number(const std::string& key, bool allow_inf = false) const {
    const std::string& t = text(key);
    if (allow_inf && (t == "inf" || t == "+inf" || t == "infinity")) return kInfinity;
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (!t.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      fail(name_, key, "cannot parse '" + t + "' as a finite number");
    }
    return v;
  }

  double number_or(const std::string& key, double fallback, bool allow_inf = false) const {
    return has(key) ? number(key, allow_inf) : fallback;
  }

  std::size_t count(const std::string& key) const {
    const std::string& t = text(key);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      fail(name_, key, "cannot parse '" + t + "' as a nonnegative integer");
    }
    return v;
  }

  const std::string& name() const { return name_; }

 private:
  std::string name_;
  const std::map<std::string, std::string>* values_ = nullptr;
};

void require_range(const SectionReader& s, const std::string& key, double v, double lo, double hi,
                   const std::string& range) {
  constexpr double tol = 1e-12;
  if (v < lo - tol || v > hi + tol) fail(s.name(), key, "must lie in " + range);
}

}  // namespace

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::gamma: return "gamma";
    case SweepVariable::phi: return "phi";
    case SweepVariable::lambda: return "lambda";
  }
  return "unknown";
}

double SweepSpec::value(std::size_t i) const {
  if (steps <= 1) return start;
  if (i + 1 == steps) return stop;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

RawConfig parse_ini(std::string_view text) {
  RawConfig raw;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!schema().contains(section)) throw ConfigError(where + "unknown section [" + section + "]");
      raw[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    check_known(section, key);
    if (value.empty()) fail(section, key, "empty value");
    if (!raw[section].emplace(key, value).second) fail(section, key, "duplicate key");
  }
  return raw;
}

void apply_override(RawConfig& raw, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form section.key=value");
  }
  const std::string section(trim(assignment.substr(0, dot)));
  const std::string key(trim(assignment.substr(dot + 1, eq - dot - 1)));
  const std::string value(trim(assignment.substr(eq + 1)));
  check_known(section, key);
  if (value.empty()) fail(section, key, "empty value");
  raw[section][key] = value;
}

ScenarioConfig build_config(const RawConfig& raw, const ParseOptions& opts) {
  const double angle = opts.degrees ? kPi / 180.0 : 1.0;
  ScenarioConfig cfg;

  const SectionReader geo(raw, "geometry");
  cfg.geometry.theta = geo.number("theta") * angle;
  cfg.geometry.gamma = geo.number("gamma") * angle;
  cfg.geometry.phi = geo.number("phi") * angle;
  require_range(geo, "theta", cfg.geometry.theta, 0.0, kPi, "[0, pi]");
  require_range(geo, "gamma", cfg.geometry.gamma, 0.0, 2.0 * kPi, "[0, 2 pi]");
  require_range(geo, "phi", cfg.geometry.phi, 0.0, kPi, "[0, pi]");

  const SectionReader probe(raw, "probe");
  cfg.probe.delta_P = probe.number("delta_P");
  cfg.probe.delta_p = probe.number("delta_p");
  cfg.probe.p_phi = probe.number_or("p_phi", kInfinity, true);
  cfg.probe.mass = probe.number_or("mass", 1.0);
  cfg.probe.hbar = probe.number_or("hbar", 1.0);
  for (const char* key : {"delta_P", "delta_p", "mass", "hbar"}) {
    if (probe.has(key) && !(probe.number(key) > 0.0)) fail("probe", key, "must be positive");
  }
  if (cfg.probe.p_phi == 0.0) fail("probe", "p_phi", "must be nonzero (use inf for no linear phase)");
  if (cfg.probe.delta_p > cfg.probe.delta_P) {
    fail("probe", "delta_p",
         "positivity violation: coherence scale delta_p must not exceed spread delta_P "
         "(density matrix would not be positive semidefinite)");
  }

  const SectionReader window(raw, "window");
  const std::string& kind = window.text("kind");
  if (kind == "rectangular") {
    cfg.window.kind = WindowKind::rectangular;
    cfg.window.duration = window.number("T");
    if (!(cfg.window.duration > 0.0)) fail("window", "T", "must be positive");
  } else if (kind == "instantaneous") {
    cfg.window.kind = WindowKind::instantaneous;
    cfg.window.duration = 0.0;
    if (window.has("T")) fail("window", "T", "not used by an instantaneous window");
  } else {
    fail("window", "kind", "must be 'instantaneous' or 'rectangular', got '" + kind + "'");
  }
  cfg.window.prep_lead = window.number_or("prep_lead", 0.0);
  if (cfg.window.prep_lead < 0.0) fail("window", "prep_lead", "must be >= 0");

  const SectionReader coupling(raw, "coupling");
  cfg.lambda = coupling.number("lambda");
  if (cfg.lambda == 0.0) fail("coupling", "lambda", "must be nonzero");

  const SectionReader grid(raw, "grid");
  if (grid.has("n_points")) {
    cfg.grid.n_points = grid.count("n_points");
    if (cfg.grid.n_points < 101 || cfg.grid.n_points % 2 == 0) {
      fail("grid", "n_points", "must be odd and >= 101");
    }
  }
  const bool min_auto = !grid.has("p_min") || grid.text("p_min") == "auto";
  const bool max_auto = !grid.has("p_max") || grid.text("p_max") == "auto";
  if (min_auto != max_auto) fail("grid", min_auto ? "p_max" : "p_min", "p_min and p_max must both be set or both auto");
  cfg.grid.automatic = min_auto;
  if (!cfg.grid.automatic) {
    cfg.grid.p_min = grid.number("p_min");
    cfg.grid.p_max = grid.number("p_max");
    if (!(cfg.grid.p_min < cfg.grid.p_max)) fail("grid", "p_max", "must exceed p_min");
  }

  const SectionReader sweep(raw, "sweep");
  if (!sweep.empty()) {
    SweepSpec spec;
    const std::string& var = sweep.text("variable");
    if (var == "gamma") {
      spec.variable = SweepVariable::gamma;
    } else if (var == "phi") {
      spec.variable = SweepVariable::phi;
    } else if (var == "lambda") {
      spec.variable = SweepVariable::lambda;
    } else {
      fail("sweep", "variable", "must be gamma, phi or lambda, got '" + var + "'");
    }
    const double scale = spec.variable == SweepVariable::lambda ? 1.0 : angle;
    spec.start = sweep.number("start") * scale;
    spec.stop = sweep.number("stop") * scale;
    spec.steps = sweep.count("steps");
    if (spec.steps < 1) fail("sweep", "steps", "must be >= 1");
    switch (spec.variable) {
      case SweepVariable::gamma:
        require_range(sweep, "start", spec.start, 0.0, 2.0 * kPi, "[0, 2 pi] for gamma");
        require_range(sweep, "stop", spec.stop, 0.0, 2.0 * kPi, "[0, 2 pi] for gamma");
        break;
      case SweepVariable::phi:
        require_range(sweep, "start", spec.start, 0.0, kPi, "[0, pi] for phi");
        require_range(sweep, "stop", spec.stop, 0.0, kPi, "[0, pi] for phi");
        break;
      case SweepVariable::lambda:
        if (spec.start == 0.0 || spec.stop == 0.0 || (spec.start > 0.0) != (spec.stop > 0.0)) {
          fail("sweep", "start", "lambda sweep must not reach or cross zero");
        }
        break;
    }
    cfg.sweep = spec;
  }
  return cfg;
}

ScenarioConfig parse_config(std::string_view text, const std::vector<std::string>& overrides,
                            const ParseOptions& opts) {
  RawConfig raw = parse_ini(text);
  for (const auto& o : overrides) apply_override(raw, o);
  return build_config(raw, opts);
}

}  // namespace weakmeter
