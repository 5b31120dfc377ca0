#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "robreg/errors.hpp"
#include "robreg/robust.hpp"
#include "robreg/stopping.hpp"

using namespace robreg;

namespace {

double cara(double g, double mu, double l) { return -mu * std::exp(-g * l) - (1 - mu) * std::exp(g * l); }

// Golden-section maximum of a unimodal function on [a, b].
template <class F>
double golden_max(F f, double a, double b) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace

TEST_CASE("robust mechanism: quadratic closed form") {
  const auto qp = quadratic_pair(1, 1, 1);
  const LevelGrid g(2.0, 2001);
  const auto r = compute_robust(qp.agent, qp.principal, Belief(0.6), g);
  CHECK(std::abs(r.L_star - 0.5) <= g.step());
  CHECK(r.lambda_star == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(r.guarantee == doctest::Approx(0.1).epsilon(1e-9));
  REQUIRE(r.surplus_curve.size() == g.size());
  for (std::size_t j = 0; j < g.size(); j += 50) {
    CHECK(r.surplus_curve[j] == doctest::Approx(0.4 * g[j] - 0.4 * g[j] * g[j]).epsilon(1e-12));
  }
  const auto& fq = std::get<FixedTaxHardQuota>(r.mechanism.family());
  CHECK(fq.quota == r.L_star);
  CHECK(fq.lambda == r.lambda_star);
}

TEST_CASE("robust mechanism: degenerate prior") {
  const auto cp = cara_pair(1.0, 3.0);
  const auto r = compute_robust(cp.agent, cp.principal, Belief(0.0), LevelGrid(2.0, 201));
  CHECK(r.L_index == 0);
  CHECK(r.guarantee == cp.principal.indirect(0.0, 0.0));
}

TEST_CASE("robust mechanism: golden-section oracle") {
  const double mu = 0.9;
  const auto surplus = [&](double l) { return cara(1.0, mu, l) - cara(1.0, mu, 0.0) + cara(3.0, mu, l); };
  const double oracle = golden_max(surplus, 0.0, 2.0);
  const auto r = compute_robust(Cara{1.0}, Cara{3.0}, Belief(mu), LevelGrid(2.0, 20001));
  CHECK(std::abs(r.guarantee - oracle) <= 1e-6);
  CHECK(r.guarantee <= oracle + 1e-12);
}

TEST_CASE("robust mechanism: translation invariance") {
  const LevelGrid g(2.0, 401);
  const PayoffSpec a = Cara{1.0};
  const auto base = compute_robust(a, Cara{3.0}, Belief(0.7), g);
  const auto moved = compute_robust(a.shifted(5.0, g), Cara{3.0}, Belief(0.7), g);
  CHECK(moved.L_index == base.L_index);
  CHECK(moved.guarantee == doctest::Approx(base.guarantee).epsilon(1e-12));
  CHECK(moved.lambda_star == doctest::Approx(base.lambda_star).epsilon(1e-12));
}

TEST_CASE("joint robustness") {
  const LevelGrid g(2.0, 1001);
  const PayoffSpec p = Cara{3.0};
  const Belief mu0(0.8);
  CHECK_THROWS_AS(AmbiguitySet({}), DomainError);
  SUBCASE("singleton equals the single-agent result") {
    const auto a = compute_joint_robust(AmbiguitySet({Cara{1.0}}), p, mu0, g);
    const auto b = compute_robust(Cara{1.0}, p, mu0, g);
    CHECK(a.L_index == b.L_index);
    CHECK(a.guarantee == b.guarantee);
    CHECK(a.lambda_star == b.lambda_star);
  }
  SUBCASE("two CARA agents") {
    const auto j = compute_joint_robust(AmbiguitySet({Cara{1.0}, Cara{2.0}}), p, mu0, g);
    const auto r1 = compute_robust(Cara{1.0}, p, mu0, g);
    const auto r2 = compute_robust(Cara{2.0}, p, mu0, g);
    CHECK(j.guarantee <= std::min(r1.guarantee, r2.guarantee));
    CHECK(j.L_star >= std::min(r1.L_star, r2.L_star));
    CHECK(j.L_star <= std::max(r1.L_star, r2.L_star));
    // nested sets can only lower the guarantee
    const auto k = compute_joint_robust(AmbiguitySet({Cara{1.0}, Cara{2.0}, Cara{0.5}}), p, mu0, g);
    CHECK(k.guarantee <= j.guarantee);
  }
  SUBCASE("shifted copies change nothing") {
    const PayoffSpec a = Cara{1.0};
    const auto j = compute_joint_robust(AmbiguitySet({a, a.shifted(3.0, g)}), p, mu0, g);
    const auto r = compute_robust(a, p, mu0, g);
    CHECK(j.L_index == r.L_index);
    CHECK(j.guarantee == doctest::Approx(r.guarantee).epsilon(1e-12));
  }
  SUBCASE("validation reports per member") {
    const AmbiguitySet set({Cara{1.0}, Cara{5.0}});
    const auto reports = set.validate(p, LevelGrid(2.0, 101));
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].all());
    CHECK_FALSE(reports[1].ordered);
  }
}

TEST_CASE("verify guarantee") {
  const auto qp = quadratic_pair(1, 1, 1);
  const LevelGrid g(2.0, 401);
  const auto r = compute_robust(qp.agent, qp.principal, Belief(0.6), g);
  const auto rep = verify_guarantee(r, {qp.agent}, qp.principal, g);
  CHECK(rep.holds);
  CHECK(std::abs(rep.min_value - 0.1) <= 1e-8);
  CHECK(rep.participation_gap <= 1e-12);
  CHECK(rep.random_trees == 50);
  CHECK(rep.random_min >= r.guarantee - 1e-8);
  REQUIRE(rep.tree_value.has_value());
  CHECK(*rep.tree_value >= r.guarantee - 1e-8);

  const auto cp = cara_pair(1.0, 3.0);
  const auto rc = compute_robust(cp.agent, cp.principal, Belief(0.8), g);
  VerifyOptions o;
  o.random_trees = 200;
  o.seed = 77;
  CHECK(verify_guarantee(rc, {cp.agent}, cp.principal, g, o).holds);
}

TEST_CASE("random tree values: serial and parallel agree") {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(1.0, 12);
  const auto r = compute_robust(cp.agent, cp.principal, Belief(0.7), g);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 64; ++s) seeds.push_back(s * 31 + 1);
  const auto a = kernels::serial::random_tree_values(cp.agent, cp.principal, r.mechanism, Belief(0.7), g, seeds, 4);
  const auto b = kernels::omp::random_tree_values(cp.agent, cp.principal, r.mechanism, Belief(0.7), g, seeds, 4);
  CHECK(a == b);
  for (double v : a) CHECK(v >= r.guarantee - 1e-8);
}
