#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "robreg/grid.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/payoff.hpp"
#include "robreg/process.hpp"
#include "robreg/stopping.hpp"

namespace robreg {

/// Largest instance the oracle accepts.
inline constexpr std::size_t kOracleMaxLevels = 4;
inline constexpr std::size_t kOracleMaxBeliefs = 5;

struct TreeOracleResult {
  double value = 0.0;     // worst principal value
  double lp_value = 0.0;  // optimum over participating trees
  bool escaped = false;   // value is the outside option V(mu0, 0)
  /// Stopping mass before the terminal level at beliefs above 0, in the optimum found
  /// and the largest such mass over all optimal trees.
  double interior_positive_mass = 0.0;
  double max_interior_positive_mass = 0.0;
  std::vector<StopAtom> joint;  // stopping distribution of the optimal tree
  std::optional<DiscreteLearningProcess> process;
  std::size_t history_nodes = 0;
};

/**
 * Exact worst case over all layered belief trees whose level-j beliefs lie in
 * supports[j].
 *
 * Nodes are belief histories. Each node's mass is split between stopping and
 * continuing (an uninformative split, so both parts are genuine learning
 * processes); the agent must be willing to stop on the stopping part (no later
 * level is better at the same belief) and to continue on the rest (the
 * descendants' stopping payoffs beat stopping now). With these obedience rows
 * the problem is a single LP over node masses.
 *
 * Throws BudgetExceededError beyond kOracleMaxLevels levels or kOracleMaxBeliefs
 * beliefs, InfeasibleError when no participating tree exists (for example when
 * the prior lies outside the hull of the level-0 support).
 */
TreeOracleResult tree_oracle_worst_case(const PayoffSpec& agent, const PayoffSpec& principal,
                                        const Mechanism& m, const LevelGrid& small_grid, Belief mu0,
                                        const std::vector<std::vector<double>>& supports);

/// Same support at every level.
TreeOracleResult tree_oracle_worst_case(const PayoffSpec& agent, const PayoffSpec& principal,
                                        const Mechanism& m, const LevelGrid& small_grid, Belief mu0,
                                        const std::vector<double>& support);

/// Largest number of internal history nodes for pattern enumeration (2^16 patterns).
inline constexpr std::size_t kPatternMaxNodes = 16;

/**
 * Cross-check: enumerates every pure stop/continue pattern on the history tree
 * (no node split between the two) and solves the LP of each; returns the
 * smallest value. Never below the tree oracle's value.
 */
double tree_oracle_enumerate(const PayoffSpec& agent, const PayoffSpec& principal, const Mechanism& m,
                             const LevelGrid& small_grid, Belief mu0,
                             const std::vector<std::vector<double>>& supports);

}  // namespace robreg
