#pragma once

#include <cstddef>
#include <vector>

namespace robreg {

enum class Sense { le, ge, eq };

struct LpRow {
  std::vector<double> a;
  Sense sense = Sense::le;
  double b = 0.0;
};

/// minimize c'x subject to the rows and x >= 0.
struct LpProblem {
  std::vector<double> c;
  std::vector<LpRow> rows;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
  // For infeasible problems: the original row violated most at the phase-one point.
  std::size_t worst_row = 0;
  double worst_violation = 0.0;
};

struct LpOptions {
  double eps = 1e-11;
  /// Consecutive degenerate pivots before switching from Dantzig pricing to Bland's rule.
  std::size_t bland_after = 50;
  std::size_t max_iterations = 0;  // 0: 50 * (rows + columns)
  /// Price by reduced cost over column norm instead of reduced cost alone.
  bool steepest_edge = true;
};

/**
 * Dense two-phase tableau simplex.
 *
 * Rows are scaled to unit infinity norm; equalities become a pair of
 * inequalities. Pricing is steepest edge (reduced cost over the column's
 * norm in the current tableau, or plain Dantzig when disabled) until a run of
 * degenerate pivots, then Bland's rule, which cannot cycle.
 */
LpResult solve_lp(const LpProblem& lp, LpOptions opts = {});

}  // namespace robreg
