#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robreg/checks.hpp"
#include "robreg/grid.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/payoff.hpp"

namespace robreg {

/// Fixed tax lambda* with a hard quota at L*, and the max-min value it guarantees.
struct RobustMechanismResult {
  double L_star = 0.0;
  std::size_t L_index = 0;
  double lambda_star = 0.0;
  double guarantee = 0.0;
  std::vector<double> surplus_curve;  // [U(mu0,l) - U(mu0,0)] + V(mu0,l) per level
  Mechanism mechanism;
  double mu0 = 0.0;
  LevelGrid grid{1.0, 2};
};

/// Finite set of candidate agent payoffs.
struct AmbiguitySet {
  std::vector<PayoffSpec> members;

  /// Throws DomainError when empty.
  explicit AmbiguitySet(std::vector<PayoffSpec> members);
  /// check_assumptions for each member against the principal.
  std::vector<AssumptionReport> validate(const PayoffSpec& principal, const LevelGrid& grid) const;
};

/// L* is the smallest grid maximiser of the surplus curve.
RobustMechanismResult compute_robust(const PayoffSpec& agent, const PayoffSpec& principal,
                                     Belief mu0, const LevelGrid& grid);

/// Same on the lower envelope of the members' surplus curves; lambda is the
/// smallest member's U(mu0, L) - U(mu0, 0).
RobustMechanismResult compute_joint_robust(const AmbiguitySet& ambiguity, const PayoffSpec& principal,
                                           Belief mu0, const LevelGrid& grid);

struct GuaranteeReport {
  double min_value = 0.0;   // smallest principal value found
  double gap = 0.0;         // |min_value - guarantee|
  double lp_value = 0.0;    // smallest bad-news worst case over agents
  std::optional<double> tree_value;  // small-instance oracle, when it ran
  double participation_gap = 0.0;    // max |no-learning root value - U(mu0,0)|
  double random_min = 0.0;           // smallest value over the random trees
  std::size_t random_trees = 0;
  bool holds = false;  // every value >= guarantee - tol
};

struct VerifyOptions {
  std::size_t random_trees = 50;
  std::size_t max_beliefs = 4;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  bool tree_oracle = true;
};

/// Runs the bad-news LP, the small tree oracle, no learning and random trees
/// against the result's mechanism for every agent payoff.
GuaranteeReport verify_guarantee(const RobustMechanismResult& result,
                                 const std::vector<PayoffSpec>& agents, const PayoffSpec& principal,
                                 const LevelGrid& grid, VerifyOptions opts = {});

struct GapReport {
  double gap = 0.0;        // guarantee - worst
  double guarantee = 0.0;
  double worst = 0.0;
  std::string method;      // "badnews_lp", "tree_oracle" or "badnews_bound"
  bool premise = true;     // principal prefers earlier stopping under m
};

/**
 * Shortfall of m's worst case below the max-min guarantee.
 *
 * The worst case comes from the bad-news LP when the principal prefers earlier
 * stopping; otherwise from the tree oracle on grids it can handle, else the LP
 * value is reported as a bound over bad-news processes only.
 */
GapReport payoff_gap(const Mechanism& m, const PayoffSpec& agent, const PayoffSpec& principal,
                     Belief mu0, const LevelGrid& grid);

namespace kernels {
// Principal value under m for random_tree(mu0, grid, max_beliefs, seeds[i]).
namespace serial {
std::vector<double> random_tree_values(const PayoffSpec& agent, const PayoffSpec& principal,
                                       const Mechanism& m, Belief mu0, const LevelGrid& grid,
                                       const std::vector<std::uint64_t>& seeds,
                                       std::size_t max_beliefs);
}
namespace omp {
std::vector<double> random_tree_values(const PayoffSpec& agent, const PayoffSpec& principal,
                                       const Mechanism& m, Belief mu0, const LevelGrid& grid,
                                       const std::vector<std::uint64_t>& seeds,
                                       std::size_t max_beliefs);
}
}  // namespace kernels

}  // namespace robreg
