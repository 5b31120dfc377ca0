#pragma once

#include <optional>
#include <vector>

#include "robreg/grid.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/payoff.hpp"

namespace robreg {

/// First (belief, level) point at which a condition fails.
struct Witness {
  double mu = 0.0;
  double level = 0.0;
};

struct AssumptionReport {
  bool single_peaked = true;   // (i)  U(mu,.) and V(mu,.) single-peaked
  bool monotone = true;        // (ii) one-shot levels nondecreasing in mu, without jumps
  bool ordered = true;         // (iii) principal's one-shot level below the agent's
  std::optional<Witness> single_peaked_witness;
  std::optional<Witness> monotone_witness;
  std::optional<Witness> ordered_witness;

  bool all() const noexcept { return single_peaked && monotone && ordered; }
};

/**
 * Scans the belief grid for the three regularity assumptions.
 *
 * A jump in the one-shot level is a pair of adjacent beliefs whose levels differ
 * by more than two grid steps and keep doing so after the belief interval is
 * bisected down to machine precision.
 */
AssumptionReport check_assumptions(const PayoffSpec& agent, const PayoffSpec& principal,
                                   const LevelGrid& grid, const BeliefGrid& beliefs = BeliefGrid());

struct RatioReport {
  bool nondecreasing = true;
  std::optional<double> witness_level;
  std::vector<double> levels;  // interior grid levels where r is evaluated
  std::vector<double> ratio;   // |dV^phi(0,l) / dU^phi(0,l)|
};

/// Checks that |dV^phi(0,l)/dU^phi(0,l)| is nondecreasing on the grid (central differences).
/// Throws DegenerateDerivativeError where dU^phi(0,l) vanishes.
RatioReport risk_ratio_condition(const PayoffSpec& agent, const PayoffSpec& principal,
                                 const Mechanism& m, const LevelGrid& grid);

struct PremiseReport {
  bool holds = true;
  std::optional<Witness> witness;
};

/**
 * Principal prefers earlier stopping under the mechanism: on the grid truncated
 * at the terminal level, the principal's one-shot level is never above the
 * agent's, and strictly below it at interior beliefs where the agent's level is
 * strictly between 0 and the terminal level.
 */
PremiseReport principal_prefers_earlier(const PayoffSpec& agent, const PayoffSpec& principal,
                                        const Mechanism& m, const LevelGrid& grid,
                                        const BeliefGrid& beliefs = BeliefGrid());

/// One-shot levels of f at every belief of the grid (parallel scan).
std::vector<std::size_t> one_shot_levels(const LevelPayoff& f, const BeliefGrid& beliefs);

}  // namespace robreg
