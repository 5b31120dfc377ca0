#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "robreg/grid.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/payoff.hpp"
#include "robreg/process.hpp"
#include "robreg/simplex.hpp"

namespace robreg {

/**
 * Bad-news process on a grid truncated at the terminal level: the last level
 * an agent certain of the good state would choose among permitted levels.
 *
 * g[j] is the mass of bad news arriving at level j, G its running sum, and the
 * continuation belief absent bad news is mu0/(1 - G).
 */
struct BadNewsProcess {
  double mu0 = 0.0;
  LevelGrid grid{1.0, 2};
  std::vector<double> g;
  std::vector<double> G;
  std::vector<double> cont_belief;
  std::vector<std::size_t> support;  // levels with g > 1e-12

  /// Validates nonnegativity and total mass 1 - mu0 (within `tol`).
  static BadNewsProcess from_increments(double mu0, const LevelGrid& grid, std::vector<double> g,
                                        double tol = 1e-9);
  DiscreteLearningProcess as_process() const;
};

/**
 * Data of the obedience-constrained problem over bad-news processes.
 *
 * Row j (j < J) reads sum_{k>j} (U0(j) - W0(k)) g_k <= rhs[j] with
 * rhs[j] = mu0 (U1(J) - U1(j)), where U0, U1 are the agent's
 * mechanism-adjusted payoffs, W0(k) = max_{s>=k} U0(s) is the value of
 * bad news at k, and J the terminal level.
 */
struct ObedienceLP {
  double mu0 = 0.0;
  LevelGrid grid{1.0, 2};  // truncated at J
  std::vector<double> U1, U0;  // agent U^phi(1, l_j), U^phi(0, l_j)
  std::vector<double> W0;
  std::vector<std::size_t> stop;  // largest maximiser of U0 on [l_k, l_J]
  std::vector<double> rhs;
  std::vector<double> cost;  // V^phi(0, l_stop(k))
  double V1_terminal = 0.0;  // V^phi(1, l_J)
  double outside = 0.0;            // U(mu0, 0)
  double principal_outside = 0.0;  // V(mu0, 0)
  /// No learning already violates participation, so nature can keep the agent out.
  bool participation_escape = false;
  double scale = 1.0;  // magnitude of the agent payoffs, for tolerances

  std::size_t terminal() const noexcept { return U1.size() - 1; }
  double coef(std::size_t j, std::size_t k) const noexcept { return U0[j] - W0[k]; }
  /// mu0 V^phi(1, l_J) + sum_k g_k cost_k.
  double objective(const std::vector<double>& g) const;
  LpProblem to_lp() const;
};

ObedienceLP build_obedience_lp(const PayoffSpec& agent, const PayoffSpec& principal,
                               const Mechanism& m, Belief mu0, const LevelGrid& grid);

struct ObedienceReport {
  double max_violation = 0.0;          // largest negative slack, 0 if none
  double tol = 0.0;
  std::vector<double> slack;           // per row j < J
  std::vector<std::size_t> binding;    // rows with |slack| <= tol
  bool holds() const noexcept { return max_violation <= tol; }
};

/// Evaluates every obedience row; tol defaults to 1e-9 times the payoff scale.
ObedienceReport obedience_check(const BadNewsProcess& bn, const PayoffSpec& agent, const Mechanism& m,
                                double tol = -1.0);
ObedienceReport obedience_check(const ObedienceLP& lp, const std::vector<double>& g, double tol);

struct WorstCase {
  BadNewsProcess process;
  double value = 0.0;     // worst principal value (after the participation escape)
  double lp_value = 0.0;  // optimum over participating bad-news processes
  bool premise_holds = true;  // principal prefers earlier stopping; else a bad-news bound only
  bool escaped = false;       // value is the outside option V(mu0, 0)
  std::size_t iterations = 0;
};

/// Minimises the principal's value over bad-news processes by the dense simplex.
/// Throws InfeasibleError naming the most violated row.
WorstCase solve_badnews_lp(const PayoffSpec& agent, const PayoffSpec& principal, const Mechanism& m,
                           Belief mu0, const LevelGrid& grid);

struct IndifferenceResult {
  WorstCase worst;
  std::size_t lower_index = 0;  // first level with bad news (L underbar)
  bool fell_back = false;
  std::string warning;
};

/**
 * Bad-news process keeping the agent indifferent: obedience rows bind from the
 * top level down until the mass 1 - mu0 is used up; the remainder forms an
 * atom at the lowest level reached. Falls back to the LP when the construction
 * is infeasible.
 */
IndifferenceResult indifference_G(const PayoffSpec& agent, const PayoffSpec& principal,
                                  const Mechanism& m, Belief mu0, const LevelGrid& grid);

struct DualCertificate {
  std::vector<double> Lambda;  // cumulative multiplier at each level, Lambda[0] = 0
  std::vector<double> y;       // multiplier of obedience row j (Lambda increments)
  std::vector<double> g_rhs;   // mu0 (U1(J) - U1(l_j))
  std::size_t lbar_index = 0;
  double lbar = 0.0;
  double z = 0.0;  // multiplier of the mass row
  double dual_value = 0.0;
  double primal_value = 0.0;
  double gap = 0.0;  // primal - dual
  /// Bound from the multiplier that is constant below lbar (NaN when not dual feasible).
  double three_branch_value = 0.0;
  double max_cs_violation = 0.0;
  bool complementary_slackness = false;
};

/**
 * Lagrangian certificate for the bad-news problem.
 *
 * Above the first support level the multiplier is the ratio of the principal's
 * to the agent's bad-state increments, which makes every reduced cost on the
 * support equal; below it the multiplier is 0. Requires the risk-ratio
 * condition (ConditionViolatedError otherwise, or when the multiplier decreases).
 */
DualCertificate dual_certificate(const PayoffSpec& agent, const PayoffSpec& principal,
                                 const Mechanism& m, Belief mu0, const LevelGrid& grid,
                                 double cs_tol = 1e-6);
DualCertificate dual_certificate(const ObedienceLP& lp, const std::vector<double>& g_primal,
                                 double cs_tol = 1e-6);

}  // namespace robreg
