#include "robreg/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robreg/checks.hpp"
#include "robreg/errors.hpp"

namespace robreg {

namespace {

std::vector<double> atom_at_terminal(const ObedienceLP& lp) {
  std::vector<double> g(lp.U1.size(), 0.0);
  g.back() = 1.0 - lp.mu0;
  return g;
}

// Applies the participation escape and fills the common fields.
WorstCase finish(const ObedienceLP& lp, std::vector<double> g, double lp_value) {
  WorstCase w;
  w.process = BadNewsProcess::from_increments(lp.mu0, lp.grid, std::move(g));
  w.lp_value = lp_value;
  w.value = lp_value;
  if (lp.participation_escape && lp.principal_outside < lp_value) {
    w.value = lp.principal_outside;
    w.escaped = true;
  }
  return w;
}

std::vector<double> run_lp(const ObedienceLP& lp, std::size_t& iterations, bool& infeasible) {
  const LpResult res = solve_lp(lp.to_lp());
  iterations = res.iterations;
  infeasible = false;
  switch (res.status) {
    case LpStatus::optimal:
      return res.x;
    case LpStatus::infeasible:
      if (lp.participation_escape) {
        infeasible = true;
        return atom_at_terminal(lp);
      }
      throw InfeasibleError("bad-news problem infeasible; most violated row " +
                            std::to_string(res.worst_row) + " by " +
                            std::to_string(res.worst_violation));
    case LpStatus::unbounded:
      throw InfeasibleError("bad-news problem unbounded");
    case LpStatus::iteration_limit:
      throw InfeasibleError("simplex iteration limit reached after " +
                            std::to_string(res.iterations) + " pivots");
  }
  return res.x;
}

}  // namespace

WorstCase solve_badnews_lp(const PayoffSpec& agent, const PayoffSpec& principal, const Mechanism& m,
                           Belief mu0, const LevelGrid& grid) {
  const ObedienceLP lp = build_obedience_lp(agent, principal, m, mu0, grid);
  std::size_t iterations = 0;
  bool infeasible = false;
  std::vector<double> g = run_lp(lp, iterations, infeasible);
  WorstCase w;
  if (infeasible) {
    w = finish(lp, std::move(g), std::numeric_limits<double>::infinity());
    w.lp_value = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double value = lp.objective(g);
    w = finish(lp, std::move(g), value);
  }
  w.iterations = iterations;
  w.premise_holds = principal_prefers_earlier(agent, principal, m, grid).holds;
  return w;
}

IndifferenceResult indifference_G(const PayoffSpec& agent, const PayoffSpec& principal,
                                  const Mechanism& m, Belief mu0, const LevelGrid& grid) {
  const ObedienceLP lp = build_obedience_lp(agent, principal, m, mu0, grid);
  const std::size_t J = lp.terminal();
  const double mass = 1.0 - lp.mu0;
  std::vector<double> g(J + 1, 0.0);
  std::string problem;

  // Row j binding: U0(j) T_j - S_j = rhs_j with T_j = sum_{k>j} g_k, S_j = sum_{k>j} W0(k) g_k.
  double T = 0.0, S = 0.0;
  std::size_t lower = J;
  bool filled = false;
  for (std::size_t j = J; j-- > 0 && problem.empty();) {
    const double den = lp.U0[j] - lp.W0[j + 1];
    if (!(den > 0.0)) {
      problem = "agent bad-state payoff does not decrease at level " + std::to_string(lp.grid[j]);
      break;
    }
    const double gk = (lp.rhs[j] - lp.U0[j] * T + S) / den;
    if (gk < -1e-12 * std::max(1.0, mass)) {
      problem = "negative increment at level " + std::to_string(lp.grid[j + 1]);
      break;
    }
    if (T + gk >= mass) {
      g[j + 1] = mass - T;
      lower = j + 1;
      filled = true;
      break;
    }
    g[j + 1] = std::max(gk, 0.0);
    T += g[j + 1];
    S += lp.W0[j + 1] * g[j + 1];
  }
  if (problem.empty() && !filled) {
    g[0] = mass - T;
    lower = 0;
  }
  if (problem.empty()) {
    const auto check = obedience_check(lp, g, 1e-9 * lp.scale);
    if (!check.holds()) {
      problem = "obedience violated by " + std::to_string(check.max_violation);
    }
  }

  IndifferenceResult out;
  if (!problem.empty()) {
    out.fell_back = true;
    out.warning = "indifference construction failed (" + problem + "); using the LP";
    out.worst = solve_badnews_lp(agent, principal, m, mu0, grid);
    out.lower_index = out.worst.process.support.empty() ? J : out.worst.process.support.front();
    return out;
  }
  const double value = lp.objective(g);
  out.worst = finish(lp, std::move(g), value);
  out.worst.premise_holds = principal_prefers_earlier(agent, principal, m, grid).holds;
  out.lower_index = lower;
  return out;
}

DualCertificate dual_certificate(const ObedienceLP& lp, const std::vector<double>& g,
                                 double cs_tol) {
  const std::size_t n = lp.U1.size(), J = n - 1;
  if (g.size() != n) throw DomainError("primal solution does not match the problem");
  DualCertificate cert;
  cert.g_rhs = lp.rhs;
  cert.Lambda.assign(n, 0.0);
  cert.y.assign(J, 0.0);
  cert.primal_value = lp.objective(g);

  std::size_t kbar = J;
  for (std::size_t k = 0; k < n; ++k) {
    if (g[k] > 1e-10) {
      kbar = k;
      break;
    }
  }
  cert.lbar_index = kbar;
  cert.lbar = lp.grid[kbar];

  // Reduced cost r_k = cost_k + sum_{j<k} y_j (U0(j) - W0(k)); y is chosen to keep
  // r constant from kbar upward.
  const double target = lp.cost[kbar];
  double S = 0.0, L = 0.0;
  for (std::size_t k = kbar + 1; k < n; ++k) {
    const double den = lp.U0[k - 1] - lp.W0[k];
    if (!(den > 0.0)) {
      throw ConditionViolatedError("agent bad-state payoff does not decrease at level " +
                                   std::to_string(lp.grid[k - 1]));
    }
    double y = (target - lp.cost[k] - S + lp.W0[k] * L) / den;
    if (y < -1e-9 * std::max(1.0, L)) {
      throw ConditionViolatedError("multiplier decreases at level " + std::to_string(lp.grid[k]));
    }
    y = std::max(y, 0.0);
    cert.y[k - 1] = y;
    S += y * lp.U0[k - 1];
    L += y;
    cert.Lambda[k] = L;
  }

  auto dual_bound = [&](const std::vector<double>& y, std::vector<double>* reduced) {
    std::vector<double> r(n);
    double s = 0.0, lam = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      r[k] = lp.cost[k] + s - lp.W0[k] * lam;
      if (k < J) {
        s += y[k] * lp.U0[k];
        lam += y[k];
      }
    }
    const double z = *std::min_element(r.begin(), r.end());
    double v = lp.mu0 * lp.V1_terminal + (1.0 - lp.mu0) * z;
    for (std::size_t j = 0; j < J; ++j) v -= lp.rhs[j] * y[j];
    if (reduced) *reduced = std::move(r);
    return std::make_pair(v, z);
  };

  std::vector<double> r;
  const auto [dual, z] = dual_bound(cert.y, &r);
  cert.dual_value = dual;
  cert.z = z;
  cert.gap = cert.primal_value - cert.dual_value;

  // Multiplier held constant at its lbar value below lbar.
  {
    std::vector<double> lam3(n, 0.0);
    const std::size_t ref = std::clamp<std::size_t>(kbar, 1, std::max<std::size_t>(J, 1));
    auto ratio = [&](std::size_t k) {
      return (lp.cost[k] - lp.cost[k - 1]) / (lp.W0[k] - lp.W0[k - 1]);
    };
    bool ok = J >= 1;
    if (ok) {
      const double base = ratio(ref);
      for (std::size_t k = 1; k < n; ++k) lam3[k] = k <= kbar ? base : ratio(k);
    }
    std::vector<double> y3(J, 0.0);
    for (std::size_t j = 0; ok && j < J; ++j) {
      y3[j] = lam3[j + 1] - lam3[j];
      if (!std::isfinite(y3[j]) || y3[j] < 0.0) ok = false;
    }
    cert.three_branch_value =
        ok ? dual_bound(y3, nullptr).first : std::numeric_limits<double>::quiet_NaN();
  }

  const double tol = cs_tol * lp.scale;
  const auto rows = obedience_check(lp, g, tol);
  double worst = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double slack = std::abs(rows.slack[j]);
    if (g[j] > 1e-9 || cert.y[j] > 1e-12) worst = std::max(worst, slack / lp.scale);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (g[k] > 1e-9) worst = std::max(worst, (r[k] - z) / std::max(1.0, std::abs(z)));
  }
  cert.max_cs_violation = worst;
  cert.complementary_slackness = worst <= cs_tol;
  return cert;
}

DualCertificate dual_certificate(const PayoffSpec& agent, const PayoffSpec& principal,
                                 const Mechanism& m, Belief mu0, const LevelGrid& grid,
                                 double cs_tol) {
  const auto ratio = risk_ratio_condition(agent, principal, m, grid);
  if (!ratio.nondecreasing) {
    throw ConditionViolatedError("risk-ratio condition fails at level " +
                                 std::to_string(ratio.witness_level.value_or(0.0)));
  }
  const ObedienceLP lp = build_obedience_lp(agent, principal, m, mu0, grid);
  std::size_t iterations = 0;
  bool infeasible = false;
  const auto g = run_lp(lp, iterations, infeasible);
  if (infeasible) throw InfeasibleError("no participating bad-news process");
  return dual_certificate(lp, g, cs_tol);
}

}  // namespace robreg
