#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hyperlab/runner.hpp"

namespace {

struct Flags {
  std::string name;
  std::string config;
  std::string out;
  std::string format;
  std::size_t points = 0;
  double half_width = 0;
  long long seed = -1;
  unsigned workers = 0;
  std::vector<std::string> params;
  std::vector<std::string> ranges;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("name", f.name, "check name, or 'all'")->required();
  cmd->add_option("--config", f.config, "key = value config file");
  cmd->add_option("--out", f.out, "report path (default: stdout)");
  cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--grid-points", f.points, "grid points")->check(CLI::PositiveNumber);
  cmd->add_option("--half-width", f.half_width, "grid half width")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "seed for random corpus members")->check(CLI::NonNegativeNumber);
  cmd->add_option("--workers", f.workers, "worker threads (0: hardware)");
  cmd->add_option("--param", f.params, "parameter override k=v")->take_all();
}

hyperlab::RunConfig effective_config(const Flags& f) {
  hyperlab::RunConfig cfg;
  if (!f.config.empty()) cfg = hyperlab::RunConfig::load(f.config);
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.format.empty()) cfg.format = hyperlab::RunConfig::parse_format(f.format);
  if (f.points) cfg.points = f.points;
  if (f.half_width > 0) cfg.half_width = f.half_width;
  if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
  if (f.workers) cfg.workers = f.workers;
  for (const auto& kv : f.params) {
    const auto eq = kv.find('=');
    hyperlab::require(eq != std::string::npos, hyperlab::ErrorKind::invalid_argument,
                      "--param expects k=v, got '" + kv + "'");
    cfg.set("param." + kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!f.ranges.empty()) {
    cfg.sweep.clear();
    for (const auto& r : f.ranges) cfg.sweep.push_back(hyperlab::parse_range(r));
  }
  return cfg;
}

int emit(const hyperlab::RunReport& rep) {
  const std::string text = rep.config.format == hyperlab::OutputFormat::csv
                               ? hyperlab::to_csv(rep)
                               : hyperlab::to_json(rep).dump(2) + "\n";
  if (rep.config.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream o(rep.config.out, std::ios::binary);
    if (!o) {
      std::cerr << "error: cannot write " << rep.config.out << "\n";
      return 2;
    }
    o << text;
  }
  const auto& s = rep.summary;
  std::cerr << s.run << " reports: " << s.passed << " passed (" << s.saturated << " saturated), "
            << s.failed << " failed, " << s.warnings << " warnings\n";
  if (const auto* w = rep.worst_failure()) {
    std::cerr << "worst failure: " << w->check << " [" << w->subject << "] margin " << w->margin
              << "\n";
  }
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of hypercontractive, log-Sobolev and transport inequalities"};
  app.require_subcommand(1);
  Flags check_flags, sweep_flags;
  auto* check = app.add_subcommand("check", "run one check or 'all'");
  add_common(check, check_flags);
  auto* sweep = app.add_subcommand("sweep", "run a check over a parameter lattice");
  add_common(sweep, sweep_flags);
  sweep->add_option("--range", sweep_flags.ranges, "PARAM=LO:HI:STEPS")->take_all();
  auto* list = app.add_subcommand("list", "list the available checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*list) {
      for (const auto& e : hyperlab::catalog()) {
        std::cout << e.name << "\n    " << e.summary << "\n";
        if (!e.defaults.empty()) {
          std::cout << "    defaults:";
          for (const auto& [k, v] : e.defaults) std::cout << ' ' << k << '=' << v;
          std::cout << "\n";
        }
      }
      return 0;
    }
    if (*check) return emit(hyperlab::run_check(check_flags.name, effective_config(check_flags)));
    return emit(hyperlab::run_sweep(sweep_flags.name, effective_config(sweep_flags)));
  } catch (const hyperlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
