#include <cmath>

#include "doctest.h"

#include "robreg/adaptive.hpp"
#include "robreg/errors.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/robust.hpp"

using namespace robreg;

namespace {

std::vector<std::vector<Experiment>> blank(const PrincipalTree& t) {
  std::vector<std::vector<Experiment>> e;
  for (const auto& layer : t.process().layers()) e.emplace_back(layer.size());
  return e;
}

}  // namespace

TEST_CASE("principal trees") {
  const LevelGrid g(1.0, 9);
  const auto b = PrincipalTree::binomial(Belief(0.6), g, 0.7, 3);
  CHECK(b.process().layer(0).size() == 1);
  CHECK(b.process().layer(3).size() == 4);
  CHECK(b.process().layer(8).size() == 4);
  CHECK(PrincipalTree::binomial(Belief(0.6), g, 0.7).process().layer(8).size() == 9);
  CHECK_THROWS_AS(PrincipalTree::binomial(Belief(0.6), g, 1.2), DomainError);
  // one up then one down returns to the prior
  CHECK(b.process().layer(2)[1].belief == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("degenerate tree reproduces the static mechanism") {
  const auto cp = cara_pair(1.0, 3.0);
  for (double mu0 : {0.55, 0.7, 0.9}) {
    const LevelGrid g(2.0, 401);
    const auto tree = PrincipalTree::no_learning(Belief(mu0), g);
    const auto pol = solve_adaptive_quota(tree, cp.agent, cp.principal);
    const auto r = compute_robust(cp.agent, cp.principal, Belief(mu0), g);
    REQUIRE(pol.joint.size() == 1);
    CHECK(pol.joint[0].level_index == r.L_index);
    CHECK(pol.lambda_adaptive == r.lambda_star);
    CHECK(pol.value == r.guarantee);
  }
}

TEST_CASE("full revelation: each branch stops at its own argmax") {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(2.0, 201);
  const double mu0 = 0.6;
  const auto pol = solve_adaptive_quota(PrincipalTree::full_revelation(Belief(mu0), g), cp.agent, cp.principal);
  const auto U = LevelPayoff::raw(cp.agent, g);
  const auto V = LevelPayoff::raw(cp.principal, g);
  for (const auto& a : pol.joint) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < g.size(); ++j) {
      const double sj = U.at(a.belief, j) - U.at(mu0, 0) + V.at(a.belief, j);
      const double sb = U.at(a.belief, best) - U.at(mu0, 0) + V.at(a.belief, best);
      if (sj > sb) best = j;
    }
    CHECK(a.level_index == best);
  }
}

TEST_CASE("binomial tree: learning helps the planner") {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(1.0, 9);
  const auto tree = PrincipalTree::binomial(Belief(0.8), g, 0.7, 8);
  const auto pol = solve_adaptive_quota(tree, cp.agent, cp.principal);
  const auto r = compute_robust(cp.agent, cp.principal, Belief(0.8), g);
  CHECK(pol.value >= r.guarantee);

  // refining the planner's own tree cannot lower the DP value
  for (std::uint64_t s = 0; s < 10; ++s) {
    const PrincipalTree finer(refine_process(tree, random_experiments(tree, s)));
    CHECK(solve_adaptive_quota(finer, cp.agent, cp.principal).value >= pol.value - 1e-12);
  }
}

TEST_CASE("refinements") {
  const LevelGrid g(1.0, 6);
  const auto tree = PrincipalTree::binomial(Belief(0.6), g, 0.7);
  SUBCASE("an uninformative experiment changes nothing") {
    const auto p = refine_process(tree, blank(tree));
    for (std::size_t j = 0; j < g.size(); ++j) {
      REQUIRE(p.layer(j).size() == tree.process().layer(j).size());
      for (std::size_t i = 0; i < p.layer(j).size(); ++i) {
        CHECK(p.layer(j)[i].belief == doctest::Approx(tree.process().layer(j)[i].belief).epsilon(1e-14));
        CHECK(*p.layer(j)[i].tag == i);
      }
    }
  }
  SUBCASE("full revelation at the root") {
    const auto nl = PrincipalTree::no_learning(Belief(0.6), g);
    auto e = blank(nl);
    e[0][0] = Experiment{1.0, 0.0};
    const auto p = refine_process(nl, e);
    REQUIRE(p.layer(0).size() == 2);
    CHECK(p.layer(0)[0].belief + p.layer(0)[1].belief == 1.0);
  }
  SUBCASE("random experiments give learning processes") {
    for (std::uint64_t s = 0; s < 20; ++s) CHECK_NOTHROW(refine_process(tree, random_experiments(tree, s)));
  }
  SUBCASE("bad experiments") {
    auto e = blank(tree);
    e[1][0] = Experiment{1.5, 0.2};
    CHECK_THROWS_AS(refine_process(tree, e), NotARefinementError);
    e.pop_back();
    CHECK_THROWS_AS(refine_process(tree, e), NotARefinementError);
  }
  SUBCASE("budget") {
    const LevelGrid big(1.0, 20);
    const auto nl = PrincipalTree::no_learning(Belief(0.5), big);
    auto e = blank(nl);
    for (std::size_t j = 0; j < e.size(); ++j) e[j][0] = Experiment{0.6 + 0.01 * static_cast<double>(j), 0.3};
    CHECK_THROWS_AS(refine_process(nl, e), BudgetExceededError);
  }
}

TEST_CASE("adaptive evaluation") {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(1.0, 9);
  const auto tree = PrincipalTree::binomial(Belief(0.8), g, 0.7, 8);
  const auto pol = solve_adaptive_quota(tree, cp.agent, cp.principal);
  SUBCASE("the agent who sees the tree only") {
    const auto ev = evaluate_adaptive(pol, refine_process(tree, blank(tree)), cp.agent, cp.principal);
    CHECK(std::abs(ev.value - pol.value) <= 1e-10);
    CHECK(std::abs(ev.agent_root_value - ev.outside_option) <= 1e-10);
    CHECK(ev.participation);
  }
  SUBCASE("seeded refinements never undercut the DP value") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto ev = evaluate_adaptive(pol, refine_process(tree, random_experiments(tree, 500 + s)), cp.agent,
                                        cp.principal);
      CHECK(ev.value >= pol.value - 1e-8);
    }
  }
  SUBCASE("misaligned processes are rejected") {
    CHECK_THROWS_AS(evaluate_adaptive(pol, tree.process(), cp.agent, cp.principal), AlignmentError);
    CHECK_THROWS_AS(evaluate_adaptive(pol, random_tree(Belief(0.8), g, 3, 1), cp.agent, cp.principal),
                    AlignmentError);
  }
  SUBCASE("no-learning tree reduces to the static guarantee") {
    const auto nl = PrincipalTree::no_learning(Belief(0.8), g);
    const auto p0 = solve_adaptive_quota(nl, cp.agent, cp.principal);
    const auto r = compute_robust(cp.agent, cp.principal, Belief(0.8), g);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto ev = evaluate_adaptive(p0, refine_process(nl, random_experiments(nl, s)), cp.agent, cp.principal);
      CHECK(ev.value >= r.guarantee - 1e-8);
    }
  }
}
