#include <algorithm>
#include <cmath>
#include <string>

#include "robreg/errors.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/worstcase.hpp"

namespace robreg {

BadNewsProcess BadNewsProcess::from_increments(double mu0, const LevelGrid& grid,
                                               std::vector<double> g, double tol) {
  Belief{mu0};
  if (g.size() != grid.size()) throw DomainError("bad-news increments must match the grid");
  BadNewsProcess bn;
  bn.mu0 = mu0;
  bn.grid = grid;
  bn.G.resize(g.size());
  bn.cont_belief.resize(g.size());
  double G = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g[j] < -tol) throw DomainError("negative bad-news increment at level " + std::to_string(grid[j]));
    g[j] = std::max(g[j], 0.0);
    G += g[j];
    bn.G[j] = G;
    bn.cont_belief[j] = mu0 == 0.0 ? 0.0 : std::min(1.0, mu0 / (1.0 - G));
    if (g[j] > 1e-12) bn.support.push_back(j);
  }
  if (std::abs(G - (1.0 - mu0)) > tol) {
    throw DomainError("bad-news mass " + std::to_string(G) + " differs from 1 - mu0");
  }
  bn.g = std::move(g);
  return bn;
}

DiscreteLearningProcess BadNewsProcess::as_process() const {
  // Rounding in the increments must not push the total above 1 - mu0.
  std::vector<double> scaled = g;
  double total = 0.0;
  for (double x : scaled) total += x;
  if (total > 1.0 - mu0 && total > 0.0) {
    for (double& x : scaled) x *= (1.0 - mu0) / total;
  }
  return bad_news_process(Belief(mu0), scaled, grid);
}

double ObedienceLP::objective(const std::vector<double>& g) const {
  double v = mu0 * V1_terminal;
  for (std::size_t k = 0; k < g.size(); ++k) v += g[k] * cost[k];
  return v;
}

LpProblem ObedienceLP::to_lp() const {
  const std::size_t n = U1.size(), J = n - 1;
  LpProblem lp;
  lp.c = cost;
  lp.rows.reserve(J + 2);
  for (std::size_t j = 0; j < J; ++j) {
    LpRow row{std::vector<double>(n, 0.0), Sense::le, rhs[j]};
    for (std::size_t k = j + 1; k < n; ++k) row.a[k] = coef(j, k);
    lp.rows.push_back(std::move(row));
  }
  lp.rows.push_back({std::vector<double>(n, 1.0), Sense::eq, 1.0 - mu0});
  const double slack = 1e-12 * scale;
  lp.rows.push_back({W0, Sense::ge, outside - mu0 * U1[J] - slack});
  return lp;
}

ObedienceLP build_obedience_lp(const PayoffSpec& agent, const PayoffSpec& principal,
                               const Mechanism& m, Belief mu0, const LevelGrid& grid) {
  // Good news ends where a certain agent stops: the last best level of
  // U(1,.) among permitted levels (the last permitted one when U(1,.) rises).
  const std::size_t last = terminal_level(transfers_on_grid(m, grid));
  const LevelPayoff U1 = LevelPayoff::adjusted(agent, m, Side::agent, grid.truncated(last));
  std::size_t J = last;
  for (std::size_t j = last; j-- > 0;) {
    if (U1.good(j) > U1.good(J)) J = j;
  }
  ObedienceLP lp;
  lp.mu0 = mu0.value();
  lp.grid = grid.truncated(J);
  const LevelPayoff U = LevelPayoff::adjusted(agent, m, Side::agent, lp.grid);
  const LevelPayoff V = LevelPayoff::adjusted(principal, m, Side::principal, lp.grid);
  const std::size_t n = J + 1;
  lp.U1.resize(n);
  lp.U0.resize(n);
  lp.W0.resize(n);
  lp.stop.resize(n);
  lp.rhs.resize(n);
  lp.cost.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    lp.U1[j] = U.good(j);
    lp.U0[j] = U.bad(j);
  }
  lp.W0[J] = lp.U0[J];
  lp.stop[J] = J;
  for (std::size_t k = J; k-- > 0;) {
    if (lp.U0[k] > lp.W0[k + 1]) {
      lp.W0[k] = lp.U0[k];
      lp.stop[k] = k;
    } else {
      lp.W0[k] = lp.W0[k + 1];
      lp.stop[k] = lp.stop[k + 1];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    lp.rhs[j] = lp.mu0 * (lp.U1[J] - lp.U1[j]);
    lp.cost[j] = V.bad(lp.stop[j]);
  }
  lp.V1_terminal = V.good(J);
  lp.outside = agent.indirect(lp.mu0, 0.0);
  lp.principal_outside = principal.indirect(lp.mu0, 0.0);
  lp.scale = U.scale();
  double best = U.at(lp.mu0, 0);
  for (std::size_t j = 1; j < n; ++j) best = std::max(best, U.at(lp.mu0, j));
  lp.participation_escape = best < lp.outside - 1e-9 * std::max(1.0, std::abs(lp.outside));
  return lp;
}

ObedienceReport obedience_check(const ObedienceLP& lp, const std::vector<double>& g, double tol) {
  const std::size_t n = lp.U1.size();
  if (g.size() != n) throw DomainError("bad-news process and mechanism disagree on the terminal level");
  ObedienceReport report;
  report.slack.assign(n - 1, 0.0);
  // T = sum_{k>j} g_k and S = sum_{k>j} W0(k) g_k, accumulated from the top.
  double T = 0.0, S = 0.0;
  for (std::size_t j = n - 1; j-- > 0;) {
    T += g[j + 1];
    S += lp.W0[j + 1] * g[j + 1];
    const double lhs = lp.U0[j] * T - S;
    report.slack[j] = lp.rhs[j] - lhs;
  }
  report.tol = tol;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    report.max_violation = std::max(report.max_violation, -report.slack[j]);
    if (std::abs(report.slack[j]) <= tol) report.binding.push_back(j);
  }
  return report;
}

ObedienceReport obedience_check(const BadNewsProcess& bn, const PayoffSpec& agent, const Mechanism& m,
                                double tol) {
  const ObedienceLP lp = build_obedience_lp(agent, agent, m, Belief(bn.mu0), bn.grid);
  if (tol < 0.0) tol = 1e-9 * lp.scale;
  return obedience_check(lp, bn.g, tol);
}

}  // namespace robreg
