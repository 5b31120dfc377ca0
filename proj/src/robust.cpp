#include "robreg/robust.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "robreg/errors.hpp"
#include "robreg/kernels.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/process.hpp"
#include "robreg/stopping.hpp"
#include "robreg/tree_oracle.hpp"
#include "robreg/worstcase.hpp"

namespace robreg {

namespace {

std::size_t first_argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (v[j] > v[best]) best = j;
  }
  return best;
}

RobustMechanismResult assemble(std::vector<double> curve, double lambda, std::size_t L, Belief mu0,
                               const LevelGrid& grid) {
  RobustMechanismResult r;
  r.L_index = L;
  r.L_star = grid[L];
  r.lambda_star = lambda;
  r.guarantee = curve[L];
  r.surplus_curve = std::move(curve);
  r.mechanism = FixedTaxHardQuota{lambda, grid[L]};
  r.mu0 = mu0.value();
  r.grid = grid;
  return r;
}

double tree_value(const PayoffSpec& agent, const PayoffSpec& principal, const Mechanism& m,
                  Belief mu0, const LevelGrid& grid, std::uint64_t seed, std::size_t max_beliefs) {
  const auto proc = random_tree(mu0, grid, max_beliefs, seed);
  return principal_value(solve_stopping(proc, agent, m), principal, m);
}

}  // namespace

AmbiguitySet::AmbiguitySet(std::vector<PayoffSpec> m) : members(std::move(m)) {
  if (members.empty()) throw DomainError("ambiguity set must have at least one member");
}

std::vector<AssumptionReport> AmbiguitySet::validate(const PayoffSpec& principal,
                                                     const LevelGrid& grid) const {
  std::vector<AssumptionReport> out;
  for (const auto& a : members) out.push_back(check_assumptions(a, principal, grid));
  return out;
}

RobustMechanismResult compute_robust(const PayoffSpec& agent, const PayoffSpec& principal,
                                     Belief mu0, const LevelGrid& grid) {
  const LevelPayoff U = LevelPayoff::raw(agent, grid);
  const LevelPayoff V = LevelPayoff::raw(principal, grid);
  auto curve = kernels::omp::surplus_curve(U, V, mu0.value());
  const std::size_t L = first_argmax(curve);
  const double lambda = U.at(mu0.value(), L) - U.at(mu0.value(), 0);
  return assemble(std::move(curve), lambda, L, mu0, grid);
}

RobustMechanismResult compute_joint_robust(const AmbiguitySet& ambiguity, const PayoffSpec& principal,
                                           Belief mu0, const LevelGrid& grid) {
  const LevelPayoff V = LevelPayoff::raw(principal, grid);
  std::vector<LevelPayoff> agents;
  std::vector<std::vector<double>> curves;
  for (const auto& a : ambiguity.members) {
    agents.push_back(LevelPayoff::raw(a, grid));
    curves.push_back(kernels::omp::surplus_curve(agents.back(), V, mu0.value()));
  }
  auto envelope = kernels::omp::lower_envelope(curves);
  const std::size_t L = first_argmax(envelope);
  double lambda = std::numeric_limits<double>::infinity();
  for (const auto& U : agents) lambda = std::min(lambda, U.at(mu0.value(), L) - U.at(mu0.value(), 0));
  return assemble(std::move(envelope), lambda, L, mu0, grid);
}

GuaranteeReport verify_guarantee(const RobustMechanismResult& result,
                                 const std::vector<PayoffSpec>& agents, const PayoffSpec& principal,
                                 const LevelGrid& grid, VerifyOptions opts) {
  if (agents.empty()) throw DomainError("verify_guarantee needs at least one agent payoff");
  const Belief mu0(result.mu0);
  const Mechanism& m = result.mechanism;
  GuaranteeReport rep;
  rep.lp_value = std::numeric_limits<double>::infinity();
  rep.random_min = std::numeric_limits<double>::infinity();
  double lowest = std::numeric_limits<double>::infinity();

  std::vector<std::uint64_t> seeds(opts.random_trees);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = opts.seed + i;

  for (const auto& agent : agents) {
    const auto wc = solve_badnews_lp(agent, principal, m, mu0, grid);
    rep.lp_value = std::min(rep.lp_value, wc.value);

    const auto sol = solve_stopping(no_learning(mu0, grid), agent, m);
    rep.participation_gap = std::max(rep.participation_gap, std::abs(sol.root_value - sol.outside_option));
    lowest = std::min(lowest, principal_value(sol, principal, m));

    if (opts.tree_oracle) {
      // Quota at the third of four levels.
      const LevelGrid small(result.L_star > 0.0 ? 1.5 * result.L_star : 1.0, 4);
      std::vector<double> support{0.0, mu0.value(), 0.5 * (1.0 + mu0.value()), 1.0};
      std::sort(support.begin(), support.end());
      support.erase(std::unique(support.begin(), support.end()), support.end());
      const auto t = tree_oracle_worst_case(agent, principal, m, small, mu0, support);
      rep.tree_value = std::min(rep.tree_value.value_or(t.value), t.value);
    }

    if (!seeds.empty()) {
      const auto vals = kernels::omp::random_tree_values(agent, principal, m, mu0, grid, seeds,
                                                         opts.max_beliefs);
      rep.random_min = std::min(rep.random_min, *std::min_element(vals.begin(), vals.end()));
    }
  }
  rep.random_trees = seeds.size() * agents.size();
  lowest = std::min({lowest, rep.lp_value, rep.random_min, rep.tree_value.value_or(lowest)});
  rep.min_value = lowest;
  rep.gap = std::abs(lowest - result.guarantee);
  rep.holds = lowest >= result.guarantee - opts.tol;
  return rep;
}

GapReport payoff_gap(const Mechanism& m, const PayoffSpec& agent, const PayoffSpec& principal,
                     Belief mu0, const LevelGrid& grid) {
  GapReport rep;
  rep.guarantee = compute_robust(agent, principal, mu0, grid).guarantee;
  rep.premise = principal_prefers_earlier(agent, principal, m, grid).holds;
  if (!rep.premise && grid.size() <= kOracleMaxLevels) {
    std::vector<double> support{0.0, mu0.value(), 0.5 * (1.0 + mu0.value()), 1.0};
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    rep.worst = tree_oracle_worst_case(agent, principal, m, grid, mu0, support).value;
    rep.method = "tree_oracle";
  } else {
    rep.worst = solve_badnews_lp(agent, principal, m, mu0, grid).value;
    rep.method = rep.premise ? "badnews_lp" : "badnews_bound";
  }
  rep.gap = rep.guarantee - rep.worst;
  return rep;
}

namespace kernels {
namespace serial {
std::vector<double> random_tree_values(const PayoffSpec& agent, const PayoffSpec& principal,
                                       const Mechanism& m, Belief mu0, const LevelGrid& grid,
                                       const std::vector<std::uint64_t>& seeds,
                                       std::size_t max_beliefs) {
  std::vector<double> out(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    out[i] = tree_value(agent, principal, m, mu0, grid, seeds[i], max_beliefs);
  }
  return out;
}
}  // namespace serial

namespace omp {
std::vector<double> random_tree_values(const PayoffSpec& agent, const PayoffSpec& principal,
                                       const Mechanism& m, Belief mu0, const LevelGrid& grid,
                                       const std::vector<std::uint64_t>& seeds,
                                       std::size_t max_beliefs) {
  std::vector<double> out(seeds.size());
  const auto n = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = tree_value(agent, principal, m, mu0, grid, seeds[k], max_beliefs);
  }
  return out;
}
}  // namespace omp
}  // namespace kernels

}  // namespace robreg
