#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "robreg/errors.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/robust.hpp"
#include "robreg/simplex.hpp"
#include "robreg/stopping.hpp"
#include "robreg/tree_oracle.hpp"
#include "robreg/worstcase.hpp"

using namespace robreg;

namespace {

// Worst principal value under zero tax for CARA payoffs in the continuum: bad
// news keeps the agent indifferent from l_hat = log(mu0/(1-mu0))/(2 ga) on, so
// 1 - G(l) = mu0 (1 + exp(-2 ga l)), and the rest stops at L.
double cara_zero_worst(double ga, double gp, double mu0, double L) {
  const double lh = std::log(mu0 / (1 - mu0)) / (2 * ga);
  const double k = gp - 2 * ga;
  const double integral = k == 0.0 ? L - lh : (std::exp(k * L) - std::exp(k * lh)) / k;
  return -mu0 * std::exp(-gp * L) - 2 * ga * mu0 * integral - mu0 * std::exp(k * L);
}

}  // namespace

TEST_CASE("simplex on textbook problems") {
  // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18: optimum 36 at (2, 6)
  LpProblem lp{{-3, -5}, {{{1, 0}, Sense::le, 4}, {{0, 2}, Sense::le, 12}, {{3, 2}, Sense::le, 18}}};
  for (bool se : {true, false}) {
    LpOptions o;
    o.steepest_edge = se;
    const auto r = solve_lp(lp, o);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(-36));
    CHECK(r.x[0] == doctest::Approx(2));
    CHECK(r.x[1] == doctest::Approx(6));
  }
  // equality and >= rows: min x + y st x + 2y = 4, x >= 1
  const auto eq = solve_lp({{1, 1}, {{{1, 2}, Sense::eq, 4}, {{1, 0}, Sense::ge, 1}}});
  REQUIRE(eq.status == LpStatus::optimal);
  CHECK(eq.objective == doctest::Approx(2.5));
  CHECK(solve_lp({{1}, {{{1}, Sense::le, -1}}}).status == LpStatus::infeasible);
  CHECK(solve_lp({{-1, 0}, {{{1, -1}, Sense::le, 1}}}).status == LpStatus::unbounded);
}

TEST_CASE("obedience of hand-built bad-news processes") {
  const LevelGrid g(2.0, 201);
  const PayoffSpec a = Cara{1.0};
  SUBCASE("an atom at the end: slack compares staying with stopping at the prior") {
    const double mu0 = 0.6;
    std::vector<double> inc(g.size(), 0.0);
    inc.back() = 1 - mu0;
    const auto bn = BadNewsProcess::from_increments(mu0, g, inc);
    for (const PayoffSpec& p : {a, PayoffSpec(Quadratic{1, 1, 0})}) {
      const auto r = obedience_check(bn, p, ZeroTax{});
      const auto U = LevelPayoff::raw(p, g);
      const std::size_t J = g.size() - 1;
      for (std::size_t j = 0; j < J; ++j) {
        const double stay = mu0 * (U.good(J) - U.good(j)) - (1 - mu0) * (U.bad(j) - U.bad(J));
        CHECK(r.slack[j] == doctest::Approx(stay).epsilon(1e-12));
      }
      // a risk-neutral agent at 0.6 wants to go on; the CARA agent stops near 0.2
      CHECK(r.holds() == (p.family_name() == "quadratic"));
      if (r.holds()) CHECK(r.binding.empty());
    }
  }
  SUBCASE("early bad news fails at a low prior") {
    for (double mu0 : {0.05, 0.9}) {
      std::vector<double> inc(g.size(), 0.0);
      inc[g.index_of(1.0)] = 1 - mu0;
      const auto r = obedience_check(BadNewsProcess::from_increments(mu0, g, inc), a, ZeroTax{});
      CHECK(r.holds() == (mu0 > 0.5));
    }
  }
  SUBCASE("increments must carry the bad mass") {
    CHECK_THROWS_AS(BadNewsProcess::from_increments(0.6, g, std::vector<double>(g.size(), 0.0)), DomainError);
  }
}

TEST_CASE("bad-news LP under the robust quota") {
  const auto qp = quadratic_pair(1, 1, 1);
  const LevelGrid g(2.0, 2001);
  const auto r = compute_robust(qp.agent, qp.principal, Belief(0.6), g);
  const auto w = solve_badnews_lp(qp.agent, qp.principal, r.mechanism, Belief(0.6), g);
  CHECK(w.value == doctest::Approx(0.1).epsilon(1e-8));
  CHECK(w.premise_holds);
  // every bad increment sits at the quota
  CHECK(w.process.g.size() == r.L_index + 1);
  CHECK(w.process.g.back() == doctest::Approx(0.4).epsilon(1e-9));
  const auto ind = indifference_G(qp.agent, qp.principal, r.mechanism, Belief(0.6), g);
  CHECK(ind.worst.value == doctest::Approx(r.guarantee).epsilon(1e-8));
}

TEST_CASE("bad-news LP under zero tax") {
  const auto cp = cara_pair(1.0, 3.0);
  SUBCASE("closed-form integral") {
    const LevelGrid g(2.0, 2001);
    const auto w = solve_badnews_lp(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
    const double oracle = cara_zero_worst(1.0, 3.0, 0.6, 2.0);
    CHECK(oracle == doctest::Approx(-11.832094).epsilon(1e-6));
    CHECK(std::abs(w.value - oracle) <= 1e-5 * std::abs(oracle));
  }
  SUBCASE("bounded when gp < 2 ga") {
    const LevelGrid g(2.0, 1001);
    const auto w = solve_badnews_lp(Cara{1.0}, Cara{1.5}, ZeroTax{}, Belief(0.6), g);
    const double oracle = cara_zero_worst(1.0, 1.5, 0.6, 2.0);
    CHECK(std::abs(w.value - oracle) <= 1e-4 * std::abs(oracle));
  }
  SUBCASE("strictly decreasing in l_max") {
    double prev = INFINITY;
    for (double L : {2.0, 4.0, 8.0}) {
      const auto w = solve_badnews_lp(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), LevelGrid(L, 201));
      CHECK(w.value < prev);
      prev = w.value;
    }
  }
  SUBCASE("quadratic loss grows without bound") {
    const auto qp = quadratic_pair(1, 1, 5);
    double prev = INFINITY;
    for (double L : {1.0, 4.0, 16.0}) {
      const auto w = solve_badnews_lp(qp.agent, qp.principal, ZeroTax{}, Belief(0.6), LevelGrid(L, 201));
      CHECK(w.value < prev);
      prev = w.value;
    }
    CHECK(prev < -100.0);
  }
  SUBCASE("optimum below hand-built feasible processes") {
    const LevelGrid g(2.0, 401);
    const auto w = solve_badnews_lp(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
    std::vector<double> inc(g.size(), 0.0);
    inc.back() = 0.4;
    const auto atom = BadNewsProcess::from_increments(0.6, g, inc).as_process();
    const double v = principal_value(solve_stopping(atom, cp.agent, ZeroTax{}), cp.principal, ZeroTax{});
    CHECK(w.value <= v + 1e-9);
  }
}

TEST_CASE("indifference construction") {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(2.0, 1001);
  const auto ind = indifference_G(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
  CHECK_FALSE(ind.fell_back);
  const double lower = std::log(1.5) / 2.0;
  CHECK(std::abs(g[ind.lower_index] - lower) <= 2 * g.step());
  const auto& bn = ind.worst.process;
  for (std::size_t j = ind.lower_index + 2; j + 1 < bn.cont_belief.size(); ++j) {
    const double mu_hat = 1.0 / (1.0 + std::exp(-2.0 * g[j]));
    const double band = 1.0 / (1.0 + std::exp(-2.0 * (g[j] + 2 * g.step()))) - mu_hat;
    CHECK(std::abs(bn.cont_belief[j] - mu_hat) <= band);
  }
  const auto w = solve_badnews_lp(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
  const auto lp = build_obedience_lp(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
  CHECK(std::abs(ind.worst.value - w.value) <= 1e-6 * lp.scale);
  // the construction binds on its support
  const auto ob = obedience_check(lp, bn.g, 1e-9 * lp.scale);
  CHECK(ob.holds());
  for (std::size_t k : bn.support) {
    if (k > ind.lower_index && k + 1 < bn.g.size()) {
      CHECK(std::find(ob.binding.begin(), ob.binding.end(), k - 1) != ob.binding.end());
    }
  }
}

TEST_CASE("dual certificate") {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(2.0, 501);
  const auto d = dual_certificate(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
  CHECK(std::abs(d.gap) <= 1e-4 * std::abs(d.primal_value));
  CHECK(d.complementary_slackness);
  for (std::size_t j = 1; j < d.Lambda.size(); ++j) CHECK(d.Lambda[j] >= d.Lambda[j - 1] - 1e-12);
  CHECK_THROWS_AS(dual_certificate(cp.agent, cp.principal, ExponentialTax{10.0}, Belief(0.6), g),
                  ConditionViolatedError);
}

TEST_CASE("tree oracle") {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(1.0, 3);
  SUBCASE("interior stopping happens only at belief zero") {
    const auto r = tree_oracle_worst_case(cp.agent, cp.principal, ZeroTax{}, g, Belief(0.5), {0.0, 0.5, 0.9});
    CHECK(r.max_interior_positive_mass <= 1e-6);
    const double e = tree_oracle_enumerate(cp.agent, cp.principal, ZeroTax{}, g, Belief(0.5),
                                           {{0.0, 0.5, 0.9}, {0.0, 0.5, 0.9}, {0.0, 0.5, 0.9}});
    CHECK(e >= r.value - 1e-9);
    CHECK(r.process.has_value());
  }
  SUBCASE("the robust quota attains the guarantee") {
    const LevelGrid g4(1.5, 4);
    const auto rob = compute_robust(cp.agent, cp.principal, Belief(0.8), g4);
    const auto r = tree_oracle_worst_case(cp.agent, cp.principal, rob.mechanism, g4, Belief(0.8),
                                          {0.0, 0.5, 0.8, 0.9, 1.0});
    CHECK(std::abs(r.value - rob.guarantee) <= 1e-9);
  }
  SUBCASE("a single belief forces no learning") {
    const auto r = tree_oracle_worst_case(cp.agent, cp.principal, LinearTax{0.1}, g, Belief(0.7), std::vector<double>{0.7});
    const auto sol = solve_stopping(no_learning(Belief(0.7), g), cp.agent, LinearTax{0.1});
    CHECK(r.value == doctest::Approx(principal_value(sol, cp.principal, LinearTax{0.1})).epsilon(1e-12));
  }
  SUBCASE("agrees with the bad-news LP when the premise holds") {
    const auto w = solve_badnews_lp(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
    std::vector<std::vector<double>> supports;
    for (std::size_t j = 0; j < g.size(); ++j) {
      std::vector<double> s{0.0, 0.6, w.process.cont_belief[j], 1.0};
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      supports.push_back(s);
    }
    const auto r = tree_oracle_worst_case(cp.agent, cp.principal, ZeroTax{}, g, Belief(0.6), supports);
    const auto lp = build_obedience_lp(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
    CHECK(std::abs(r.value - w.value) <= 1e-9 * lp.scale);
  }
  SUBCASE("budget") {
    CHECK_THROWS_AS(tree_oracle_worst_case(cp.agent, cp.principal, ZeroTax{}, LevelGrid(1.0, 5), Belief(0.5),
                                           {0.0, 0.5}),
                    BudgetExceededError);
    CHECK_THROWS_AS(tree_oracle_worst_case(cp.agent, cp.principal, ZeroTax{}, g, Belief(0.5),
                                           {0.0, 0.1, 0.2, 0.5, 0.7, 0.9}),
                    BudgetExceededError);
    CHECK_THROWS_AS(tree_oracle_worst_case(cp.agent, cp.principal, ZeroTax{}, g, Belief(0.5), {0.6, 0.9}),
                    InfeasibleError);
  }
}

TEST_CASE("payoff gap") {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(2.0, 401);
  const auto rob = compute_robust(cp.agent, cp.principal, Belief(0.6), g);
  CHECK(std::abs(payoff_gap(rob.mechanism, cp.agent, cp.principal, Belief(0.6), g).gap) <= 1e-8);
  for (const Mechanism& m : {Mechanism(LinearTax{0.2}), Mechanism(ExponentialTax{1.0}), Mechanism(ZeroTax{})}) {
    CHECK(payoff_gap(m, cp.agent, cp.principal, Belief(0.6), g).gap >= -1e-8);
  }
  const auto qp = quadratic_pair(1, 1, 1);
  double prev = -INFINITY;
  for (double L : {2.0, 8.0, 32.0}) {
    const auto r = payoff_gap(ZeroTax{}, qp.agent, qp.principal, Belief(0.6), LevelGrid(L, 201));
    CHECK(r.gap > prev);
    prev = r.gap;
  }
  CHECK(prev > 100.0);
}

TEST_CASE("terminal level follows a certain agent's best level") {
  // a linear tax makes -exp(-l) - 0.2 l peak at log 5 < 2
  const auto w = solve_badnews_lp(Cara{1.0}, Cara{3.0}, LinearTax{0.2}, Belief(0.6), LevelGrid(2.0, 101));
  CHECK(w.process.grid.l_max() == doctest::Approx(std::log(5.0)).epsilon(0.02));
}
