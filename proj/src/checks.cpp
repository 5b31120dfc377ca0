#include "robreg/checks.hpp"

#include <algorithm>
#include <cmath>

#include "robreg/errors.hpp"
#include "robreg/kernels.hpp"

namespace robreg {

namespace {

std::vector<double> belief_points(const BeliefGrid& beliefs) {
  std::vector<double> mu(beliefs.size());
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = beliefs[k];
  return mu;
}

// First level at which f(mu,.) rises again after having strictly fallen.
std::optional<std::size_t> single_peak_violation(const LevelPayoff& f, double mu, double tol) {
  bool falling = false;
  for (std::size_t j = 0; j + 1 < f.size(); ++j) {
    const double d = f.at(mu, j + 1) - f.at(mu, j);
    if (d < -tol) falling = true;
    if (falling && d > tol) return j + 1;
  }
  return std::nullopt;
}

// Bisects [a, b] towards the largest change of the one-shot level; a jump
// survives when the change stays above two grid steps on a vanishing interval.
std::optional<Witness> refine_jump(const LevelPayoff& f, double a, double b, std::size_t la,
                                   std::size_t lb) {
  while (lb > la + 2) {
    const double m = 0.5 * (a + b);
    if (!(m > a && m < b)) return Witness{b, f.grid()[lb]};
    const std::size_t lm = one_shot_level(f, m);
    if (lm < la || lm > lb) return Witness{m, f.grid()[lm]};  // not monotone inside
    if (lm - la >= lb - lm) {
      b = m;
      lb = lm;
    } else {
      a = m;
      la = lm;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::size_t> one_shot_levels(const LevelPayoff& f, const BeliefGrid& beliefs) {
  const auto mu = belief_points(beliefs);
  return kernels::omp::one_shot_levels(f, mu);
}

AssumptionReport check_assumptions(const PayoffSpec& agent, const PayoffSpec& principal,
                                   const LevelGrid& grid, const BeliefGrid& beliefs) {
  const LevelPayoff U = LevelPayoff::raw(agent, grid);
  const LevelPayoff V = LevelPayoff::raw(principal, grid);
  const auto mu = belief_points(beliefs);
  AssumptionReport report;

  for (const LevelPayoff* f : {&U, &V}) {
    const double tol = 1e-12 * f->scale();
    for (double m : mu) {
      if (const auto j = single_peak_violation(*f, m, tol)) {
        report.single_peaked = false;
        report.single_peaked_witness = Witness{m, grid[*j]};
        break;
      }
    }
    if (!report.single_peaked) break;
  }

  const auto lu = kernels::omp::one_shot_levels(U, mu);
  const auto lv = kernels::omp::one_shot_levels(V, mu);

  for (const auto* levels : {&lu, &lv}) {
    const LevelPayoff& f = levels == &lu ? U : V;
    for (std::size_t k = 0; k + 1 < mu.size() && report.monotone; ++k) {
      const std::size_t a = (*levels)[k], b = (*levels)[k + 1];
      if (b < a) {
        report.monotone = false;
        report.monotone_witness = Witness{mu[k + 1], grid[b]};
      } else if (b > a + 2) {
        if (auto w = refine_jump(f, mu[k], mu[k + 1], a, b)) {
          report.monotone = false;
          report.monotone_witness = w;
        }
      }
    }
  }

  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (lv[k] > lu[k]) {
      report.ordered = false;
      report.ordered_witness = Witness{mu[k], grid[lv[k]]};
      break;
    }
  }
  return report;
}

RatioReport risk_ratio_condition(const PayoffSpec& agent, const PayoffSpec& principal,
                                 const Mechanism& m, const LevelGrid& grid) {
  const std::size_t J = terminal_level(transfers_on_grid(m, grid));
  const LevelGrid g = grid.truncated(J);
  const LevelPayoff U = LevelPayoff::adjusted(agent, m, Side::agent, g);
  const LevelPayoff V = LevelPayoff::adjusted(principal, m, Side::principal, g);
  const double h2 = 2.0 * g.step();
  const double tiny = 1e-14 * U.scale();

  RatioReport report;
  for (std::size_t j = 1; j + 1 < g.size(); ++j) {
    const double du = (U.bad(j + 1) - U.bad(j - 1)) / h2;
    const double dv = (V.bad(j + 1) - V.bad(j - 1)) / h2;
    if (std::abs(du) <= tiny) {
      throw DegenerateDerivativeError("agent marginal payoff vanishes at level " +
                                      std::to_string(g[j]));
    }
    report.levels.push_back(g[j]);
    report.ratio.push_back(std::abs(dv / du));
  }
  double scale = 1.0;
  for (double r : report.ratio) scale = std::max(scale, r);
  const double tol = 1e-9 * scale;
  for (std::size_t i = 0; i + 1 < report.ratio.size(); ++i) {
    if (report.ratio[i + 1] < report.ratio[i] - tol) {
      report.nondecreasing = false;
      report.witness_level = report.levels[i + 1];
      break;
    }
  }
  return report;
}

PremiseReport principal_prefers_earlier(const PayoffSpec& agent, const PayoffSpec& principal,
                                        const Mechanism& m, const LevelGrid& grid,
                                        const BeliefGrid& beliefs) {
  const std::size_t J = terminal_level(transfers_on_grid(m, grid));
  const LevelGrid g = grid.truncated(J);
  const LevelPayoff U = LevelPayoff::adjusted(agent, m, Side::agent, g);
  const LevelPayoff V = LevelPayoff::adjusted(principal, m, Side::principal, g);
  const auto mu = belief_points(beliefs);
  const auto lu = kernels::omp::one_shot_levels(U, mu);
  const auto lv = kernels::omp::one_shot_levels(V, mu);

  PremiseReport report;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const bool interior = mu[k] > 0.0 && mu[k] < 1.0 && lu[k] > 0 && lu[k] < J;
    if (lv[k] > lu[k] || (interior && lv[k] == lu[k])) {
      report.holds = false;
      report.witness = Witness{mu[k], g[lv[k]]};
      break;
    }
  }
  return report;
}

}  // namespace robreg
