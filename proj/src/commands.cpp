#include "robreg/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>

#include "json.hpp"

#include "robreg/acceptance.hpp"
#include "robreg/adaptive.hpp"
#include "robreg/checks.hpp"
#include "robreg/config.hpp"
#include "robreg/errors.hpp"
#include "robreg/io.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/robust.hpp"
#include "robreg/stopping.hpp"
#include "robreg/worstcase.hpp"

namespace robreg {

namespace {

using nlohmann::json;

constexpr std::size_t kSimulatedPaths = 20000;

RunConfig load(const CliOptions& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  RunConfig c = load_config(o.config);
  if (o.grid_n) {
    if (*o.grid_n < 2) throw ConfigError("--grid-n must be at least 2");
    c.n = *o.grid_n;
  }
  if (o.seed) c.seed = *o.seed;
  if (o.format != "json" && o.format != "csv") throw ConfigError("--format must be json or csv");
  return c;
}

std::optional<std::filesystem::path> out_dir(const CliOptions& o, const RunConfig& c) {
  if (!o.out.empty()) return std::filesystem::path(o.out);
  if (c.out_dir) return std::filesystem::path(*c.out_dir);
  return std::nullopt;
}

Mechanism resolve(const MechanismSpec& m, const RunConfig& c, const LevelGrid& grid) {
  if (!m.robust) return m.mechanism;
  return compute_robust(c.agent, c.principal, Belief(c.mu0), grid).mechanism;
}

void emit(std::ostream& out, const CliOptions& o, const json& report, const CsvTable* table) {
  if (o.format == "csv" && table) {
    table->write(out);
  } else {
    out << report.dump(2) << '\n';
  }
}

}  // namespace

int cmd_check(const CliOptions& o, std::ostream& out, std::ostream&) {
  const RunConfig c = load(o);
  const LevelGrid grid = c.grid();
  const Mechanism m = resolve(c.mechanism, c, grid);
  const auto assumptions = check_assumptions(c.agent, c.principal, grid, c.belief_grid());
  json report{{"assumptions", to_json(assumptions)}, {"mechanism", mechanism_json(m)}};
  bool ok = assumptions.all();
  try {
    const auto ratio = risk_ratio_condition(c.agent, c.principal, m, grid);
    report["ratio"] = to_json(ratio);
    ok = ok && ratio.nondecreasing;
  } catch (const DegenerateDerivativeError& e) {
    report["ratio"] = {{"error", e.what()}};
    ok = false;
  }
  report["premise"] = to_json(principal_prefers_earlier(c.agent, c.principal, m, grid, c.belief_grid()));
  report["passed"] = ok;
  if (auto dir = out_dir(o, c)) write_file_atomic(*dir / "check.json", report.dump(2) + "\n");
  out << report.dump(2) << '\n';
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_robust(const CliOptions& o, std::ostream& out, std::ostream&) {
  const RunConfig c = load(o);
  const LevelGrid grid = c.grid();
  const Belief mu0(c.mu0);
  RobustMechanismResult r;
  json report;
  if (!o.ambiguity.empty()) {
    const AmbiguitySet set(load_ambiguity(o.ambiguity, grid));
    r = compute_joint_robust(set, c.principal, mu0, grid);
    report = to_json(r);
    report["ambiguity_members"] = set.members.size();
  } else {
    r = compute_robust(c.agent, c.principal, mu0, grid);
    report = to_json(r);
  }
  const CsvTable curve = surplus_csv(r);
  if (auto dir = out_dir(o, c)) {
    write_file_atomic(*dir / "mechanism.json", mechanism_json(r.mechanism).dump(2) + "\n");
    write_file_atomic(*dir / "surplus.csv", curve.str());
  }
  emit(out, o, report, &curve);
  return kExitOk;
}

int cmd_worstcase(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = load(o);
  const LevelGrid grid = c.grid();
  const Belief mu0(c.mu0);
  const Mechanism m = resolve(c.mechanism, c, grid);

  const auto w = solve_badnews_lp(c.agent, c.principal, m, mu0, grid);
  const ObedienceLP lp = build_obedience_lp(c.agent, c.principal, m, mu0, grid);
  const auto obedience = obedience_check(lp, w.process.g, 1e-9 * lp.scale);
  json report{{"mechanism", mechanism_json(m)}, {"worst_case", to_json(w, obedience)}};
  report["guarantee"] = compute_robust(c.agent, c.principal, mu0, grid).guarantee;

  bool ratio_ok = false;
  try {
    ratio_ok = risk_ratio_condition(c.agent, c.principal, m, grid).nondecreasing;
  } catch (const DegenerateDerivativeError& e) {
    report["ratio_error"] = e.what();
  }
  report["ratio_condition"] = ratio_ok;
  if (ratio_ok) {
    const auto ind = indifference_G(c.agent, c.principal, m, mu0, grid);
    report["indifference"] = {{"value", ind.worst.value},
                              {"lower_level", lp.grid[std::min(ind.lower_index, lp.terminal())]},
                              {"fell_back", ind.fell_back},
                              {"warning", ind.warning}};
    if (ind.fell_back) err << "warning: " << ind.warning << '\n';
  }
  if (o.dual) {
    try {
      if (!ratio_ok) throw ConditionViolatedError("risk-ratio condition fails");
      report["dual"] = to_json(dual_certificate(lp, w.process.g));
    } catch (const std::runtime_error& e) {
      report["dual"] = {{"error", e.what()}, {"duality_gap", nullptr}};
    }
  }

  const LevelPayoff Ua = LevelPayoff::adjusted(c.agent, m, Side::agent, lp.grid);
  const LevelPayoff Va = LevelPayoff::adjusted(c.principal, m, Side::principal, lp.grid);
  const BeliefGrid beliefs = c.belief_grid();
  std::vector<double> mu_u, mu_v;
  for (std::size_t j = 0; j < lp.grid.size(); ++j) {
    mu_u.push_back(pseudo_inverse_belief(Ua, j, beliefs).belief);
    mu_v.push_back(pseudo_inverse_belief(Va, j, beliefs).belief);
  }
  const CsvTable curves = worstcase_csv(w, obedience, mu_u, mu_v);
  if (auto dir = out_dir(o, c)) {
    write_file_atomic(*dir / "worstcase.csv", curves.str());
    write_file_atomic(*dir / "worstcase.json", report.dump(2) + "\n");
    // stopping distribution of the worst case, exact and simulated
    const auto proc = w.process.as_process();
    const auto sol = solve_stopping(proc, c.agent, m);
    write_file_atomic(*dir / "joint.csv", joint_csv(sol.joint).str());
    if (c.seed) write_file_atomic(*dir / "empirical.csv", empirical_csv(simulate(proc, sol, kSimulatedPaths, *c.seed)).str());
  }
  emit(out, o, report, &curves);
  return kExitOk;
}

int cmd_gap(const CliOptions& o, std::ostream& out, std::ostream&) {
  const RunConfig c = load(o);
  std::vector<double> sweep = c.gap_l_max.empty() ? std::vector<double>{c.l_max} : c.gap_l_max;
  std::vector<MechanismSpec> mechs = c.gap_mechanisms;
  if (mechs.empty()) mechs.push_back(c.mechanism);
  const Belief mu0(c.mu0);

  CsvTable table{{"l_max", "mechanism", "guarantee", "worst", "gap", "method", "premise"}, {}};
  json rows = json::array();
  bool nonnegative = true;
  for (double l : sweep) {
    const LevelGrid grid(l, c.n);
    for (const auto& spec : mechs) {
      const auto g = payoff_gap(resolve(spec, c, grid), c.agent, c.principal, mu0, grid);
      table.add({cell(l), spec.label, cell(g.guarantee), cell(g.worst), cell(g.gap), g.method, cell(g.premise)});
      json row = to_json(g);
      row["l_max"] = l;
      row["mechanism"] = spec.label;
      rows.push_back(row);
      nonnegative = nonnegative && g.gap >= -c.tolerance * std::max(1.0, std::abs(g.guarantee));
    }
  }
  json report{{"rows", rows}, {"nonnegative", nonnegative}};
  if (auto dir = out_dir(o, c)) write_file_atomic(*dir / "gap.csv", table.str());
  emit(out, o, report, &table);
  return nonnegative ? kExitOk : kExitCheckFailed;
}

int cmd_adaptive(const CliOptions& o, std::ostream& out, std::ostream&) {
  const RunConfig c = load(o);
  const std::uint64_t seed = c.require_seed();
  const LevelGrid grid = c.grid();
  const Belief mu0(c.mu0);
  const PrincipalTree tree =
      c.tree.type == "binomial"          ? PrincipalTree::binomial(mu0, grid, c.tree.q, c.tree.steps.value_or(grid.size() - 1))
      : c.tree.type == "full_revelation" ? PrincipalTree::full_revelation(mu0, grid)
                                         : PrincipalTree::no_learning(mu0, grid);
  const auto pol = solve_adaptive_quota(tree, c.agent, c.principal);
  // the agent who learns exactly what the principal learns
  auto none = random_experiments(tree, seed);
  for (auto& layer : none) std::fill(layer.begin(), layer.end(), Experiment{});
  const auto self = evaluate_adaptive(pol, refine_process(tree, none), c.agent, c.principal);

  double min_value = std::numeric_limits<double>::infinity();
  std::size_t below = 0;
  for (std::size_t i = 0; i < c.refinements; ++i) {
    const auto proc = refine_process(tree, random_experiments(tree, seed + i));
    const double v = evaluate_adaptive(pol, proc, c.agent, c.principal).value;
    min_value = std::min(min_value, v);
    if (v < pol.value - c.tolerance) ++below;
  }
  json report{{"policy", to_json(pol)},
              {"static", to_json(compute_robust(c.agent, c.principal, mu0, grid))},
              {"tree", {{"type", c.tree.type}, {"nodes", tree.process().node_count()}}},
              {"self", {{"value", self.value},
                        {"agent_root_value", self.agent_root_value},
                        {"outside_option", self.outside_option},
                        {"participation", self.participation}}},
              {"refinements", {{"count", c.refinements},
                               {"min_value", c.refinements ? json(min_value) : json(nullptr)},
                               {"below_dp", below}}},
              {"passed", below == 0}};
  const CsvTable policy = policy_csv(pol);
  if (auto dir = out_dir(o, c)) {
    write_file_atomic(*dir / "policy.csv", policy.str());
    write_file_atomic(*dir / "adaptive.json", report.dump(2) + "\n");
  }
  emit(out, o, report, &policy);
  return below == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_accept(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const auto results = run_acceptance(o.quick, out);
  json report = json::array();
  std::vector<int> failed;
  for (const auto& r : results) {
    report.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"seconds", r.seconds},
                      {"budget_seconds", r.budget_seconds}, {"detail", r.detail}});
    if (!r.passed) failed.push_back(r.id);
  }
  if (!o.out.empty()) write_file_atomic(std::filesystem::path(o.out) / "acceptance.json", report.dump(2) + "\n");
  for (int id : failed) err << "criterion " << id << " failed\n";
  return failed.empty() ? kExitOk : kExitCheckFailed;
}

int run_command(const std::string& name, const CliOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (name == "check") return cmd_check(o, out, err);
    if (name == "robust") return cmd_robust(o, out, err);
    if (name == "worstcase") return cmd_worstcase(o, out, err);
    if (name == "gap") return cmd_gap(o, out, err);
    if (name == "adaptive") return cmd_adaptive(o, out, err);
    if (name == "accept") return cmd_accept(o, out, err);
    err << "unknown command '" << name << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace robreg
