#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "robreg/level_payoff.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/payoff.hpp"
#include "robreg/process.hpp"

namespace robreg {

/// Mass of paths stopping at (level, belief).
struct StopAtom {
  std::size_t level_index = 0;
  double level = 0.0;
  double belief = 0.0;
  double mass = 0.0;
};

struct StoppingSolution {
  std::vector<std::vector<double>> value;  // per node; NaN on layers past the terminal level
  std::vector<std::vector<char>> stop;     // per node; 1 where the agent stops
  std::vector<StopAtom> joint;             // sorted by level, then belief
  double root_value = 0.0;
  double outside_option = 0.0;  // U(mu0, 0)
  bool participation = false;
  std::size_t terminal = 0;     // last level the agent may stop at
  double mu0 = 0.0;
};

struct StoppingOptions {
  /// Continuing is chosen when it is worse than stopping by at most slack*max(1,|stop|).
  double tie_slack = 1e-9;
};

/**
 * Agent's optimal stopping by backward induction.
 *
 * Stopping at a prohibited level is impossible and continuing into one is
 * excluded, so the agent always stops by the terminal level. Ties go to
 * continuing. Participation compares the root value with U(mu0, 0).
 * Throws EmptyMechanismError if level 0 is prohibited.
 */
StoppingSolution solve_stopping(const DiscreteLearningProcess& proc, const PayoffSpec& agent,
                                const Mechanism& m, StoppingOptions opts = {});

/// Same, with a tabulated U^phi and optional per-node forced stops (nonzero entries).
StoppingSolution solve_stopping(const DiscreteLearningProcess& proc, const LevelPayoff& agent_phi,
                                double outside_option,
                                const std::vector<std::vector<char>>* forced_stop = nullptr,
                                StoppingOptions opts = {});

/// E[V^phi] over the stopping distribution, or V(mu0, 0) without participation.
/// Throws UnreachableLevelError if the distribution puts mass on a prohibited level.
double principal_value(const StoppingSolution& sol, const PayoffSpec& principal, const Mechanism& m);

/// Empirical stopping distribution from n_paths simulated paths.
struct EmpiricalJoint {
  std::vector<StopAtom> atoms;  // sorted like StoppingSolution::joint
  std::size_t n_paths = 0;
};

/// Simulates paths with one random stream per path derived from (seed, path index),
/// so the sample does not depend on the number of threads.
EmpiricalJoint simulate(const DiscreteLearningProcess& proc, const StoppingSolution& sol,
                        std::size_t n_paths, std::uint64_t seed);

namespace kernels {
namespace serial {
/// Terminal (layer, node) of each path, flattened as layer * stride + node.
std::vector<std::uint64_t> simulate_paths(const DiscreteLearningProcess& proc,
                                          const StoppingSolution& sol, std::size_t n_paths,
                                          std::uint64_t seed);
}
namespace omp {
std::vector<std::uint64_t> simulate_paths(const DiscreteLearningProcess& proc,
                                          const StoppingSolution& sol, std::size_t n_paths,
                                          std::uint64_t seed);
}
}  // namespace kernels

}  // namespace robreg
