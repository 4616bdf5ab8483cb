// weakmeter: spin-1/2 weak-measurement scenarios from an INI config, CSV out.
//
//   weakmeter sweep|compare|distribution|extrema --config FILE
//             [--set section.key=value]... [--jobs N] [--degrees] [--out FILE]
//
// Exit codes: 0 ok, 1 configuration error, 2 physics-domain error,
// 3 internal numeric assertion.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "weakmeter/errors.hpp"
#include "weakmeter/scenario.hpp"

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  unsigned jobs = 1;
  bool degrees = false;
  std::string out_path;
};

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "scenario configuration file")->required();
  sub->add_option("--set", opt.overrides, "override a config value, section.key=value");
  sub->add_option("--jobs", opt.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  sub->add_flag("--degrees", opt.degrees, "angles in the config are degrees");
  sub->add_option("--out", opt.out_path, "write CSV here instead of stdout");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw weakmeter::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& command, const Options& opt) {
  using namespace weakmeter;
  const ScenarioConfig cfg = parse_config(read_file(opt.config_path), opt.overrides, {opt.degrees});

  std::ofstream file;
  if (!opt.out_path.empty()) {
    file.open(opt.out_path);
    if (!file) throw ConfigError("cannot open output file '" + opt.out_path + "'");
  }
  std::ostream& os = opt.out_path.empty() ? std::cout : file;

  if (command == "sweep" || command == "compare") {
    const auto rows = run_sweep(cfg, opt.jobs);
    write_sweep_csv(os, cfg, rows, command == "compare");
  } else if (command == "distribution") {
    if (cfg.sweep) std::cerr << "weakmeter: [sweep] ignored by distribution\n";
    const DistributionTable table = run_distribution(cfg);
    if (table.weak_regime_violated) {
      std::cerr << "weakmeter: warning: pre/post overlap below lambda/delta_p, weak-value formulas do not apply\n";
    }
    write_distribution_csv(os, table);
  } else {
    if (cfg.sweep) std::cerr << "weakmeter: [sweep] ignored by extrema\n";
    write_extrema_csv(os, run_extrema(cfg));
  }
  return os.good() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak measurement with probe dynamics: sweeps, pointer distributions, extrema"};
  app.require_subcommand(1);
  Options opt;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"sweep", "tabulate <A> exact vs weak-value approximation along the [sweep]"},
           {"compare", "sweep plus approximation-error columns"},
           {"distribution", "conditional pointer density over the p grid"},
           {"extrema", "extremal <A> and variance, closed form and brute force"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, opt);
    subs.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    return run(command, opt);
  } catch (const weakmeter::VanishingPostselectionError& e) {
    std::cerr << "weakmeter: " << e.what() << " (postselection probability " << e.probability() << ")\n";
    return 2;
  } catch (const weakmeter::DomainError& e) {
    std::cerr << "weakmeter: " << e.what() << '\n';
    return 2;
  } catch (const weakmeter::ValidationError& e) {
    std::cerr << "weakmeter: config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "weakmeter: internal error: " << e.what() << '\n';
    return 3;
  }
}
