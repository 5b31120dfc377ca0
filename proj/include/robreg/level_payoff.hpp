#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "robreg/grid.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/payoff.hpp"

namespace robreg {

enum class Side { agent, principal };

/**
 * Indirect payoff tabulated on a level grid.
 *
 * Holds f(1, l_j) and f(0, l_j); f(mu, l_j) is their exact mixture. The
 * mechanism-adjusted variants subtract (agent) or add (principal) the
 * transfer, and mark prohibited levels as not allowed.
 */
class LevelPayoff {
 public:
  static LevelPayoff raw(const PayoffSpec& p, const LevelGrid& grid);
  static LevelPayoff adjusted(const PayoffSpec& p, const Mechanism& m, Side side,
                              const LevelGrid& grid);

  const LevelGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return good_.size(); }
  bool allowed(std::size_t j) const noexcept { return allowed_[j]; }
  double good(std::size_t j) const noexcept { return good_[j]; }
  double bad(std::size_t j) const noexcept { return bad_[j]; }

  /// f(mu, l_j). Throws UnreachableLevelError at a prohibited level.
  double at(double mu, std::size_t j) const;
  /// f(mu, l_j), empty at a prohibited level (the -infinity marker for the agent).
  std::optional<double> try_at(double mu, std::size_t j) const noexcept {
    if (!allowed_[j]) return std::nullopt;
    return mu * good_[j] + (1.0 - mu) * bad_[j];
  }

  /// Largest magnitude over allowed entries, at least 1; used to scale tolerances.
  double scale() const noexcept;

 private:
  LevelPayoff(LevelGrid grid, std::vector<double> good, std::vector<double> bad,
              std::vector<bool> allowed);

  LevelGrid grid_;
  std::vector<double> good_;
  std::vector<double> bad_;
  std::vector<bool> allowed_;
};

/// U(mu,l) - phi(l) for the agent (empty when prohibited) or V(mu,l) + phi(l)
/// for the principal (throws UnreachableLevelError when prohibited).
std::optional<double> mechanism_adjusted(const PayoffSpec& p, const Mechanism& m, Side side,
                                         Belief mu, double l);

/// Largest grid maximiser of f(mu, .) over allowed levels (ties go to more development).
std::size_t one_shot_level(const LevelPayoff& f, double mu);

struct PseudoInverse {
  double belief = 1.0;
  bool saturated = false;
};

/**
 * Smallest belief whose one-shot level reaches l_j (for j = 0: the smallest
 * belief at which stopping at 0 is no longer the unique choice).
 *
 * The crossing is located on the belief grid by bisection (the one-shot level
 * is monotone in the belief under the regularity assumptions) and then refined
 * between neighbouring grid beliefs. Unreachable levels return belief 1 with
 * the saturated flag set.
 */
PseudoInverse pseudo_inverse_belief(const LevelPayoff& f, std::size_t j, const BeliefGrid& beliefs);

}  // namespace robreg
