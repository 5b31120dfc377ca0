#include <cmath>
#include <random>

#include "doctest.h"

#include "robreg/checks.hpp"
#include "robreg/errors.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/payoff.hpp"

using namespace robreg;

namespace {

// continuous CARA one-shot level and its inverse
double cara_hat(double gamma, double mu) { return std::log(mu / (1.0 - mu)) / (2.0 * gamma); }
double cara_mu_hat(double gamma, double l) { return 1.0 / (1.0 + std::exp(-2.0 * gamma * l)); }

}  // namespace

TEST_CASE("grid basics") {
  const LevelGrid g(2.0, 2001);
  CHECK(g.size() == 2001);
  CHECK(g[0] == 0.0);
  CHECK(g.l_max() == 2.0);
  CHECK(g[500] == 0.5);
  CHECK(g.index_of(0.5) == 500);
  CHECK(g.truncated(0).size() == 1);
  CHECK_THROWS_AS(g.index_of(2.5), DomainError);
  CHECK_THROWS_AS(LevelGrid(1.0, 1), DomainError);
  CHECK_THROWS_AS(Belief(1.5), DomainError);
  CHECK_THROWS_AS(Belief(-0.1), DomainError);
  const BeliefGrid b(11);
  CHECK(b[0] == 0.0);
  CHECK(b[10] == 1.0);
  CHECK(b[5] == doctest::Approx(0.5));
}

TEST_CASE("indirect utility") {
  const LevelGrid g(2.0, 201);
  const PayoffSpec q = Quadratic{1, 1, 1};
  CHECK(indirect_utility(q, Belief(0.6), 0.5, g) == doctest::Approx(0.1 - 0.4 * 0.25));
  const PayoffSpec qa = Quadratic{1, 1, 0};
  CHECK(indirect_utility(qa, Belief(0.6), 0.5, g) == doctest::Approx(0.1).epsilon(1e-14));
  const PayoffSpec c = Cara{1.0};
  CHECK(indirect_utility(c, Belief(0.5), 1.0, g) ==
        doctest::Approx(-(std::exp(-1.0) + std::exp(1.0)) / 2).epsilon(1e-14));
  CHECK(indirect_utility(c, Belief(1.0), 1.3, g) == c.utility(State::good, 1.3));
  CHECK_THROWS_AS(indirect_utility(c, Belief(0.5), 2.5, g), DomainError);
  CHECK_THROWS_AS(c.utility(State::good, -0.1), DomainError);

  // linearity in the belief, to machine precision
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const PayoffSpec& p : {PayoffSpec(Cara{2.0}), PayoffSpec(Crra{2.0, 0.01}), q}) {
    for (int t = 0; t < 100; ++t) {
      const double mu = u(rng), l = 2.0 * u(rng);
      const double lhs = p.indirect(mu, l);
      const double rhs = mu * p.utility(State::good, l) + (1 - mu) * p.utility(State::bad, l);
      CHECK(std::abs(lhs - rhs) <= 1e-15 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("crra and tabulated families") {
  const PayoffSpec c = Crra{2.0, 0.01};
  // (W^(1-g) - 1)/(1-g) at g = 2 is 1 - 1/W
  CHECK(c.utility(State::good, 0.5) == doctest::Approx(1.0 - 2.0));
  CHECK(c.utility(State::bad, 0.5) == doctest::Approx(1.0 - 0.5));
  CHECK(c.utility(State::good, 0.0) == c.utility(State::good, 0.01));

  const LevelGrid g(1.0, 3);
  const PayoffSpec t = Tabulated{g, {0.0, 1.0, 1.5}, {0.0, -1.0, -3.0}};
  CHECK(t.utility(State::good, 0.5) == 1.0);
  CHECK(t.utility(State::good, 0.75) == doctest::Approx(1.25));
  CHECK(t.utility(State::bad, 0.25) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(t.utility(State::bad, 1.5), DomainError);
}

TEST_CASE("mechanism transfers") {
  const LevelGrid g(2.0, 2001);
  const PayoffSpec q = Quadratic{1, 1, 0};
  const Mechanism fq = FixedTaxHardQuota{0.1, 0.5};
  CHECK(*fq.at(0.5) == 0.1);
  CHECK_FALSE(fq.at(0.6).has_value());
  CHECK(fq.is_quota_type());
  CHECK(*Mechanism(LinearTax{0.2}).at(1.5) == doctest::Approx(0.3));
  CHECK(*Mechanism(ExponentialTax{2.0}).at(0.0) == 0.0);
  CHECK(*Mechanism(ExponentialTax{2.0}).at(1.0) == doctest::Approx(std::expm1(2.0) / 2.0));

  for (double mu : {0.0, 0.3, 1.0}) {
    for (double l : {0.0, 0.7, 2.0}) {
      CHECK(*mechanism_adjusted(q, ZeroTax{}, Side::agent, Belief(mu), l) == q.indirect(mu, l));
    }
  }
  CHECK(*mechanism_adjusted(q, fq, Side::agent, Belief(0.6), 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_FALSE(mechanism_adjusted(q, fq, Side::agent, Belief(0.6), 0.6).has_value());
  CHECK_THROWS_AS(mechanism_adjusted(q, fq, Side::principal, Belief(0.6), 0.6), UnreachableLevelError);

  const auto tr = transfers_on_grid(fq, g);
  CHECK(terminal_level(tr) == 500);
  CHECK_THROWS_AS(terminal_level(std::vector<Transfer>{prohibited, 0.0}), EmptyMechanismError);
}

TEST_CASE("one-shot level") {
  const LevelGrid g(2.0, 2001);
  const auto U = LevelPayoff::raw(Cara{1.0}, g);
  CHECK(one_shot_level(U, 0.5) == 0);
  const double mu1 = std::exp(2.0) / (1.0 + std::exp(2.0));
  CHECK(std::abs(g[one_shot_level(U, mu1)] - 1.0) <= g.step());
  for (double mu : {0.55, 0.7, 0.9, 0.97}) {
    CHECK(std::abs(g[one_shot_level(U, mu)] - cara_hat(1.0, mu)) <= g.step());
  }
  const auto Q = LevelPayoff::raw(Quadratic{1, 1, 0}, g);
  CHECK(one_shot_level(Q, 0.7) == g.size() - 1);

  // a hard quota caps the one-shot level
  const auto Uq = LevelPayoff::adjusted(Cara{1.0}, FixedTaxHardQuota{0.05, 0.8}, Side::agent, g);
  for (double mu : {0.5, 0.8, 0.99}) CHECK(g[one_shot_level(Uq, mu)] <= 0.8);
}

TEST_CASE("pseudo-inverse belief") {
  const LevelGrid g(2.0, 2001);
  const BeliefGrid b(1001);
  const auto U = LevelPayoff::raw(Cara{1.0}, g);
  CHECK(pseudo_inverse_belief(U, 0, b).belief == doctest::Approx(0.5).epsilon(1e-3));
  const auto p1 = pseudo_inverse_belief(U, g.index_of(1.0), b);
  CHECK_FALSE(p1.saturated);
  CHECK(std::abs(p1.belief - cara_mu_hat(1.0, 1.0)) <= 1e-3);

  // Galois connection with the one-shot level
  for (std::size_t j = 0; j < g.size(); j += 37) {
    const auto p = pseudo_inverse_belief(U, j, b);
    if (!p.saturated) CHECK(one_shot_level(U, p.belief) >= j);
  }

  // a quota makes levels above it unreachable
  const auto Uq = LevelPayoff::adjusted(Cara{1.0}, FixedTaxHardQuota{0.0, 1.0}, Side::agent, g);
  const auto sat = pseudo_inverse_belief(Uq, g.index_of(1.0) + 1, b);
  CHECK(sat.saturated);
  CHECK(sat.belief == 1.0);
}

TEST_CASE("assumption checks") {
  const LevelGrid g(2.0, 201);
  SUBCASE("cara pair passes") {
    const auto cp = cara_pair(1.0, 3.0);
    const auto r = check_assumptions(cp.agent, cp.principal, g);
    CHECK(r.all());
    CHECK_FALSE(r.ordered_witness.has_value());
  }
  SUBCASE("swapped risk aversion breaks the ordering") {
    const auto r = check_assumptions(Cara{3.0}, Cara{1.0}, g);
    CHECK(r.single_peaked);
    CHECK_FALSE(r.ordered);
    REQUIRE(r.ordered_witness.has_value());
    CHECK(r.ordered_witness->mu > 0.5);
  }
  SUBCASE("quadratic pair jumps at one half") {
    const auto qp = quadratic_pair(1, 1, 1);
    const auto r = check_assumptions(qp.agent, qp.principal, g);
    CHECK(r.single_peaked);
    CHECK(r.ordered);
    CHECK_FALSE(r.monotone);
    REQUIRE(r.monotone_witness.has_value());
    CHECK(r.monotone_witness->mu == doctest::Approx(0.5).epsilon(1e-3));
  }
}

TEST_CASE("comparative statics of one-shot levels") {
  const LevelGrid g(2.0, 401);
  const BeliefGrid b(501);
  for (double gp : {1.5, 3.0, 6.0}) {
    const auto cp = cara_pair(1.0, gp);
    const auto lu = one_shot_levels(LevelPayoff::raw(cp.agent, g), b);
    const auto lv = one_shot_levels(LevelPayoff::raw(cp.principal, g), b);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(lv[k] <= lu[k]);
  }
}

TEST_CASE("risk-ratio condition") {
  const LevelGrid g(2.0, 201);
  const auto cp = cara_pair(1.0, 3.0);
  for (double beta : {0.0, 0.2, 1.0}) {
    CHECK(risk_ratio_condition(cp.agent, cp.principal, LinearTax{beta}, g).nondecreasing);
  }
  CHECK(risk_ratio_condition(cp.agent, cp.principal, ExponentialTax{1.0}, g).nondecreasing);
  const auto bad = risk_ratio_condition(cp.agent, cp.principal, ExponentialTax{10.0}, g);
  CHECK_FALSE(bad.nondecreasing);
  CHECK(bad.witness_level.has_value());
  // zero tax, CARA: the ratio is (gp/ga) exp((gp-ga) l), increasing
  const auto z = risk_ratio_condition(cp.agent, cp.principal, ZeroTax{}, g);
  REQUIRE(z.levels.size() == z.ratio.size());
  for (std::size_t i = 0; i < z.levels.size(); i += 20) {
    CHECK(z.ratio[i] == doctest::Approx(3.0 * std::exp(2.0 * z.levels[i])).epsilon(1e-3));
  }
}

TEST_CASE("premise: principal prefers earlier stopping") {
  const LevelGrid g(2.0, 201);
  const auto cp = cara_pair(1.0, 3.0);
  CHECK(principal_prefers_earlier(cp.agent, cp.principal, ZeroTax{}, g).holds);
  const auto r = principal_prefers_earlier(Cara{3.0}, Cara{1.0}, ZeroTax{}, g);
  CHECK_FALSE(r.holds);
  CHECK(r.witness.has_value());
}

TEST_CASE("liability transform") {
  const LevelGrid g(2.0, 201);
  const PayoffSpec a = Quadratic{1, 1, 1};
  const PayoffSpec p = Quadratic{1, 1, 3};
  const auto t0 = liability_transform(a, 0.0, p, g);
  for (std::size_t j = 0; j < g.size(); j += 10) {
    CHECK(t0.utility(State::bad, g[j]) == doctest::Approx(a.utility(State::bad, g[j])));
    CHECK(t0.utility(State::good, g[j]) == doctest::Approx(a.utility(State::good, g[j])));
  }
  // payoffs align exactly while the liability is below the cap
  const double M = 0.5;
  const auto tm = liability_transform(a, M, p, g);
  const double edge = std::sqrt(M / (3.0 - 1.0));
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g[j] <= edge) CHECK(tm.utility(State::bad, g[j]) == doctest::Approx(p.utility(State::bad, g[j])));
    else CHECK(tm.utility(State::bad, g[j]) == doctest::Approx(a.utility(State::bad, g[j]) - M));
    CHECK(tm.utility(State::good, g[j]) == doctest::Approx(a.utility(State::good, g[j])));
  }
  CHECK_THROWS_AS(liability_transform(a, -1.0, p, g), DomainError);
}
