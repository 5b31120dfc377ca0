#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "robreg/grid.hpp"
#include "robreg/payoff.hpp"
#include "robreg/process.hpp"
#include "robreg/stopping.hpp"

namespace robreg {

/// The principal's own learning process, known in advance.
class PrincipalTree {
 public:
  explicit PrincipalTree(DiscreteLearningProcess proc);

  static PrincipalTree no_learning(Belief mu0, const LevelGrid& grid);
  static PrincipalTree full_revelation(Belief mu0, const LevelGrid& grid);
  /**
   * Recombining binomial tree: at each of the first `steps` levels after 0 a
   * signal of accuracy q (P(up | good) = P(down | bad) = q) arrives; beliefs
   * are frozen afterwards. steps defaults to every level.
   */
  static PrincipalTree binomial(Belief mu0, const LevelGrid& grid, double q,
                                std::size_t steps = static_cast<std::size_t>(-1));

  const DiscreteLearningProcess& process() const noexcept { return proc_; }

 private:
  DiscreteLearningProcess proc_;
};

/// Fixed tax with a per-node quota: the agent must stop at nodes in stop_set.
struct AdaptivePolicy {
  PrincipalTree tree;
  std::vector<std::vector<char>> stop_set;  // per tree node
  std::vector<std::vector<double>> node_value;
  double lambda_adaptive = 0.0;
  double value = 0.0;  // DP value at the root
  double mu0 = 0.0;
  std::vector<StopAtom> joint;  // where the tree's paths stop
};

/**
 * Backward induction on the tree with stop payoff (U(mu,l) - U(mu0,0)) + V(mu,l).
 * Ties stop, so a constant tree stops at the smallest maximiser like the static
 * construction. lambda is E[U at the stopping nodes] - U(mu0,0).
 */
AdaptivePolicy solve_adaptive_quota(const PrincipalTree& tree, const PayoffSpec& agent,
                                    const PayoffSpec& principal);

/// Extra binary signal: P(high | good) = q1, P(high | bad) = q0.
struct Experiment {
  double q1 = 0.5;
  double q0 = 0.5;
  bool informative() const noexcept { return q1 != q0; }
};

/**
 * Agent process that sees the principal's signal plus, on arrival at each tree
 * node, the outcome of that node's experiment. Agent nodes are tagged with the
 * tree node they sit on. experiments[j][i] belongs to tree node i of layer j.
 * Throws NotARefinementError for invalid experiments or if the result fails
 * the kernel and martingale checks; BudgetExceededError past 2^16 nodes in a layer.
 */
DiscreteLearningProcess refine_process(const PrincipalTree& tree,
                                       const std::vector<std::vector<Experiment>>& experiments);

/// Each node's experiment is informative with probability 1/2 (seeded).
std::vector<std::vector<Experiment>> random_experiments(const PrincipalTree& tree, std::uint64_t seed);

struct AdaptiveEvaluation {
  double value = 0.0;  // principal's expected payoff, transfers included
  double agent_root_value = 0.0;
  double outside_option = 0.0;
  bool participation = false;
};

/// Agent stops optimally under the tax lambda and the policy's stopping region.
/// Throws AlignmentError when agent_proc is not tagged along the policy's tree.
AdaptiveEvaluation evaluate_adaptive(const AdaptivePolicy& policy,
                                     const DiscreteLearningProcess& agent_proc,
                                     const PayoffSpec& agent, const PayoffSpec& principal);

}  // namespace robreg
