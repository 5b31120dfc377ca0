#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "robreg/errors.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/process.hpp"
#include "robreg/stopping.hpp"
#include "robreg/worstcase.hpp"

using namespace robreg;

namespace {

// Best agent value over every node-based stop/continue rule (last layer stops).
double brute_force_value(const DiscreteLearningProcess& p, const PayoffSpec& agent, const Mechanism& m) {
  const auto U = LevelPayoff::adjusted(agent, m, Side::agent, p.grid());
  std::vector<std::pair<std::size_t, std::size_t>> free;
  for (std::size_t j = 0; j + 1 < p.depth(); ++j)
    for (std::size_t i = 0; i < p.layer(j).size(); ++i) free.emplace_back(j, i);
  REQUIRE(free.size() <= 20);
  double best = -INFINITY;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
    std::vector<std::vector<char>> stop(p.depth());
    for (std::size_t j = 0; j < p.depth(); ++j) stop[j].assign(p.layer(j).size(), j + 1 == p.depth());
    for (std::size_t k = 0; k < free.size(); ++k) stop[free[k].first][free[k].second] = (mask >> k) & 1;
    std::vector<double> reach(p.layer(0).size(), 0.0);
    for (const auto& e : p.root()) reach[e.child] += e.prob;
    double v = 0.0;
    for (std::size_t j = 0; j < p.depth(); ++j) {
      std::vector<double> next(j + 1 < p.depth() ? p.layer(j + 1).size() : 0, 0.0);
      for (std::size_t i = 0; i < p.layer(j).size(); ++i) {
        if (reach[i] == 0.0) continue;
        if (stop[j][i]) {
          v += reach[i] * U.at(p.layer(j)[i].belief, j);
        } else {
          for (const auto& e : p.layer(j)[i].children) next[e.child] += reach[i] * e.prob;
        }
      }
      reach = std::move(next);
    }
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

TEST_CASE("process constructors") {
  const LevelGrid g(1.0, 6);
  const auto nl = no_learning(Belief(0.6), g);
  CHECK(nl.depth() == 6);
  for (const auto& layer : nl.layers()) {
    REQUIRE(layer.size() == 1);
    CHECK(layer[0].belief == 0.6);
  }
  const auto fr = full_revelation(Belief(0.3), g);
  CHECK(fr.layer(0).size() == 2);
  const auto sp = level0_split(Belief(0.5), 0.0, 0.51, g);
  CHECK(sp.layer(0).size() == 2);
  CHECK_THROWS_AS(level0_split(Belief(0.5), 0.6, 0.9, g), DomainError);

  // martingale violations are rejected
  std::vector<DiscreteLearningProcess::Layer> layers(2);
  layers[0] = {ProcessNode{0.5, {{0, 1.0}}, {}}};
  layers[1] = {ProcessNode{0.7, {}, {}}};
  CHECK_THROWS_AS(DiscreteLearningProcess(LevelGrid(1.0, 2), 0.5, {{0, 1.0}}, layers), DomainError);
  layers[0][0].children = {{0, 0.9}};
  layers[1][0].belief = 0.5;
  CHECK_THROWS_AS(DiscreteLearningProcess(LevelGrid(1.0, 2), 0.5, {{0, 1.0}}, layers), DomainError);
}

TEST_CASE("process json round trip") {
  const auto p = random_tree(Belief(0.4), LevelGrid(1.0, 5), 3, 11);
  const auto q = process_from_json(to_json(p));
  REQUIRE(q.depth() == p.depth());
  for (std::size_t j = 0; j < p.depth(); ++j) {
    REQUIRE(q.layer(j).size() == p.layer(j).size());
    for (std::size_t i = 0; i < p.layer(j).size(); ++i) CHECK(q.layer(j)[i].belief == p.layer(j)[i].belief);
  }
}

TEST_CASE("no learning reduces to the one-shot level") {
  const LevelGrid g(2.0, 201);
  for (double mu0 : {0.3, 0.6, 0.9}) {
    const auto sol = solve_stopping(no_learning(Belief(mu0), g), Cara{1.0}, ZeroTax{});
    const auto U = LevelPayoff::raw(Cara{1.0}, g);
    const std::size_t l = one_shot_level(U, mu0);
    REQUIRE(sol.joint.size() == 1);
    CHECK(sol.joint[0].level_index == l);
    CHECK(sol.root_value == doctest::Approx(U.at(mu0, l)));
  }
}

TEST_CASE("quota under no learning binds participation") {
  const LevelGrid g(2.0, 2001);
  const auto sol = solve_stopping(no_learning(Belief(0.6), g), Quadratic{1, 1, 0}, FixedTaxHardQuota{0.1, 0.5});
  REQUIRE(sol.joint.size() == 1);
  CHECK(sol.joint[0].level == 0.5);
  CHECK(sol.joint[0].mass == doctest::Approx(1.0));
  CHECK(std::abs(sol.root_value - sol.outside_option) <= 1e-12);
  CHECK(sol.participation);
  CHECK(principal_value(sol, Quadratic{1, 1, 1}, FixedTaxHardQuota{0.1, 0.5}) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("full revelation decouples the branches") {
  const LevelGrid g(2.0, 201);
  const auto cp = cara_pair(1.0, 3.0);
  const double mu0 = 0.6;
  const auto sol = solve_stopping(full_revelation(Belief(mu0), g), cp.agent, ZeroTax{});
  REQUIRE(sol.joint.size() == 2);
  CHECK(sol.joint[0].belief == 0.0);
  CHECK(sol.joint[0].level == 0.0);
  CHECK(sol.joint[1].belief == 1.0);
  CHECK(sol.joint[1].level == 2.0);
  const double expect = mu0 * cp.principal.utility(State::good, 2.0) + (1 - mu0) * cp.principal.utility(State::bad, 0.0);
  CHECK(principal_value(sol, cp.principal, ZeroTax{}) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("non-participation pays the outside option") {
  const LevelGrid g(1.0, 11);
  const auto cp = cara_pair(1.0, 3.0);
  const auto sol = solve_stopping(random_tree(Belief(0.6), g, 3, 5), cp.agent, LinearTax{50.0});
  // a steep tax still allows stopping at 0 for free
  CHECK(sol.participation);
  const auto sol2 = solve_stopping(no_learning(Belief(0.6), g), cp.agent, FixedTaxHardQuota{1.0, 1.0});
  CHECK_FALSE(sol2.participation);
  CHECK(principal_value(sol2, cp.principal, FixedTaxHardQuota{1.0, 1.0}) == cp.principal.indirect(0.6, 0.0));
}

TEST_CASE("bad news: the agent stops only on bad news or at the end") {
  const LevelGrid g(2.0, 401);
  const auto cp = cara_pair(1.0, 3.0);
  const auto ind = indifference_G(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
  const auto sol = solve_stopping(ind.worst.process.as_process(), cp.agent, ZeroTax{});
  for (const auto& a : sol.joint) {
    if (a.mass > 1e-12) CHECK((a.belief == 0.0 || a.level == g.l_max()));
  }
}

TEST_CASE("stopping matches brute force on small trees") {
  const LevelGrid g(1.0, 4);
  const auto cp = cara_pair(1.0, 3.0);
  const Mechanism mechs[] = {ZeroTax{}, LinearTax{0.3}, FixedTaxHardQuota{0.05, 1.0}};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto p = random_tree(Belief(0.55), g, 3, seed);
    for (const auto& m : mechs) {
      const auto sol = solve_stopping(p, cp.agent, m);
      CHECK(sol.root_value == doctest::Approx(brute_force_value(p, cp.agent, m)).epsilon(1e-12));
    }
  }
}

TEST_CASE("stopping invariants on random trees") {
  const LevelGrid g(1.5, 12);
  const auto cp = cara_pair(1.0, 3.0);
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const double mu0 = 0.3 + 0.01 * static_cast<double>(seed - 100);
    const auto p = random_tree(Belief(mu0), g, 4, seed);
    const auto sol = solve_stopping(p, cp.agent, LinearTax{0.1});
    double mass = 0.0, mean = 0.0;
    for (const auto& a : sol.joint) {
      mass += a.mass;
      mean += a.mass * a.belief;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(mean - mu0) <= 1e-9);
    // learning never hurts the agent
    const auto base = solve_stopping(no_learning(Belief(mu0), g), cp.agent, LinearTax{0.1});
    CHECK(sol.root_value >= base.root_value - 1e-12);
  }
}

TEST_CASE("simulation") {
  const LevelGrid g(2.0, 201);
  const auto cp = cara_pair(1.0, 3.0);
  SUBCASE("no learning gives a single exact atom") {
    const auto p = no_learning(Belief(0.6), g);
    const auto sol = solve_stopping(p, cp.agent, ZeroTax{});
    const auto e = simulate(p, sol, 100000, 1);
    REQUIRE(e.atoms.size() == 1);
    CHECK(e.atoms[0].mass == 1.0);
    CHECK(e.atoms[0].level_index == sol.joint[0].level_index);
  }
  SUBCASE("bad news within the DKW band") {
    const auto ind = indifference_G(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g);
    const auto p = ind.worst.process.as_process();
    const auto sol = solve_stopping(p, cp.agent, ZeroTax{});
    const std::size_t n = 100000;
    const auto e = simulate(p, sol, n, 42);
    std::vector<double> exact(g.size(), 0.0), emp(g.size(), 0.0);
    for (const auto& a : sol.joint) exact[a.level_index] += a.mass;
    for (const auto& a : e.atoms) emp[a.level_index] += a.mass;
    const double eps = std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(n)));
    double fe = 0.0, fx = 0.0, worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      fe += emp[j];
      fx += exact[j];
      worst = std::max(worst, std::abs(fe - fx));
    }
    CHECK(worst <= eps);
  }
  SUBCASE("determinism") {
    const auto p = random_tree(Belief(0.5), g, 4, 9);
    const auto sol = solve_stopping(p, cp.agent, ZeroTax{});
    const auto a = simulate(p, sol, 5000, 7);
    const auto b = simulate(p, sol, 5000, 7);
    REQUIRE(a.atoms.size() == b.atoms.size());
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
      CHECK(a.atoms[i].mass == b.atoms[i].mass);
      CHECK(a.atoms[i].belief == b.atoms[i].belief);
    }
    CHECK(kernels::serial::simulate_paths(p, sol, 3000, 5) == kernels::omp::simulate_paths(p, sol, 3000, 5));
    CHECK_THROWS_AS(simulate(p, sol, 0, 1), DomainError);
  }
}
