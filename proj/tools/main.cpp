#include <iostream>

#include "CLI11.hpp"

#include "robreg/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Robust regulation of costly learning"};
  app.require_subcommand(1);
  robreg::CliOptions o;
  std::size_t grid_n = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "JSON config file");
    if (needs_config) c->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--grid-n", grid_n, "override grid.n");
    sub->add_option("--seed", seed, "override seed");
    sub->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* check = app.add_subcommand("check", "verify assumptions, the risk-ratio condition and the premise");
  add_common(check, true);
  auto* robust = app.add_subcommand("robust", "robust fixed-tax hard-quota mechanism");
  add_common(robust, true);
  robust->add_option("--ambiguity", o.ambiguity, "JSON list of agent payoffs");
  auto* worst = app.add_subcommand("worstcase", "worst-case learning process for a mechanism");
  add_common(worst, true);
  worst->add_flag("--dual", o.dual, "emit the dual certificate");
  auto* gap = app.add_subcommand("gap", "guarantee gap sweep");
  add_common(gap, true);
  auto* adaptive = app.add_subcommand("adaptive", "adaptive quota on a principal learning tree");
  add_common(adaptive, true);
  auto* accept = app.add_subcommand("accept", "run the acceptance criteria");
  add_common(accept, false);
  accept->add_flag("--quick", o.quick, "fast subset only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : robreg::kExitConfig;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--grid-n")) o.grid_n = grid_n;
    if (sub->count("--seed")) o.seed = seed;
    return robreg::run_command(sub->get_name(), o, std::cout, std::cerr);
  }
  return robreg::kExitConfig;
}
