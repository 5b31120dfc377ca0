#include "robreg/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "robreg/errors.hpp"

namespace robreg {

namespace {

std::vector<StopAtom> merge_atoms(std::map<std::pair<std::size_t, double>, double>& acc,
                                  const LevelGrid& grid) {
  std::vector<StopAtom> out;
  out.reserve(acc.size());
  for (const auto& [key, mass] : acc) {
    if (mass <= 0.0) continue;
    out.push_back({key.first, grid[key.first], key.second, mass});
  }
  return out;
}

}  // namespace

StoppingSolution solve_stopping(const DiscreteLearningProcess& proc, const LevelPayoff& U,
                                double outside_option,
                                const std::vector<std::vector<char>>* forced_stop,
                                StoppingOptions opts) {
  if (U.size() != proc.depth()) throw DomainError("payoff table and process grids differ");
  if (!U.allowed(0)) throw EmptyMechanismError("mechanism prohibits every level");
  std::size_t T = 0;
  while (T + 1 < U.size() && U.allowed(T + 1)) ++T;

  const auto& layers = proc.layers();
  StoppingSolution sol;
  sol.terminal = T;
  sol.mu0 = proc.mu0();
  sol.outside_option = outside_option;
  sol.value.resize(layers.size());
  sol.stop.resize(layers.size());
  for (std::size_t j = 0; j < layers.size(); ++j) {
    sol.value[j].assign(layers[j].size(), std::numeric_limits<double>::quiet_NaN());
    sol.stop[j].assign(layers[j].size(), 1);
  }

  for (std::size_t jj = T + 1; jj-- > 0;) {
    for (std::size_t i = 0; i < layers[jj].size(); ++i) {
      const auto& node = layers[jj][i];
      const double stop = U.at(node.belief, jj);
      const bool forced = jj == T || (forced_stop && (*forced_stop)[jj][i]);
      if (forced) {
        sol.value[jj][i] = stop;
        continue;
      }
      double cont = 0.0;
      for (const auto& e : node.children) cont += e.prob * sol.value[jj + 1][e.child];
      const double slack = opts.tie_slack * std::max(1.0, std::abs(stop));
      if (cont >= stop - slack) {
        sol.stop[jj][i] = 0;
        sol.value[jj][i] = std::max(cont, stop);
      } else {
        sol.value[jj][i] = stop;
      }
    }
  }

  sol.root_value = 0.0;
  for (const auto& e : proc.root()) sol.root_value += e.prob * sol.value[0][e.child];
  sol.participation =
      sol.root_value >= outside_option - opts.tie_slack * std::max(1.0, std::abs(outside_option));

  std::map<std::pair<std::size_t, double>, double> acc;
  std::vector<double> mass(layers[0].size(), 0.0);
  for (const auto& e : proc.root()) mass[e.child] += e.prob;
  for (std::size_t j = 0; j <= T; ++j) {
    std::vector<double> next(j + 1 < layers.size() ? layers[j + 1].size() : 0, 0.0);
    for (std::size_t i = 0; i < layers[j].size(); ++i) {
      if (mass[i] == 0.0) continue;
      if (sol.stop[j][i]) {
        acc[{j, layers[j][i].belief}] += mass[i];
      } else {
        for (const auto& e : layers[j][i].children) next[e.child] += mass[i] * e.prob;
      }
    }
    mass = std::move(next);
  }
  sol.joint = merge_atoms(acc, proc.grid());
  return sol;
}

StoppingSolution solve_stopping(const DiscreteLearningProcess& proc, const PayoffSpec& agent,
                                const Mechanism& m, StoppingOptions opts) {
  const LevelPayoff U = LevelPayoff::adjusted(agent, m, Side::agent, proc.grid());
  return solve_stopping(proc, U, agent.indirect(proc.mu0(), 0.0), nullptr, opts);
}

double principal_value(const StoppingSolution& sol, const PayoffSpec& principal, const Mechanism& m) {
  if (!sol.participation) return principal.indirect(sol.mu0, 0.0);
  double total = 0.0;
  for (const auto& a : sol.joint) {
    const Transfer phi = m.at(a.level);
    if (!phi) {
      throw UnreachableLevelError("stopping mass on prohibited level " + std::to_string(a.level));
    }
    total += a.mass * (principal.indirect(a.belief, a.level) + *phi);
  }
  return total;
}

}  // namespace robreg
