#include <random>

#include "doctest.h"

#include "robreg/kernels.hpp"
#include "robreg/level_payoff.hpp"

using namespace robreg;

// The OpenMP variants must match the serial references bit for bit.

TEST_CASE("one-shot level scan") {
  const LevelGrid g(3.0, 3001);
  std::vector<double> beliefs;
  for (int k = 0; k <= 2000; ++k) beliefs.push_back(k / 2000.0);
  for (const PayoffSpec& p : {PayoffSpec(Cara{1.0}), PayoffSpec(Cara{3.0}), PayoffSpec(Quadratic{1, 1, 1})}) {
    const auto f = LevelPayoff::raw(p, g);
    CHECK(kernels::serial::one_shot_levels(f, beliefs) == kernels::omp::one_shot_levels(f, beliefs));
  }
}

TEST_CASE("surplus curve and envelope") {
  const LevelGrid g(2.0, 5001);
  const auto U = LevelPayoff::raw(Cara{1.0}, g);
  const auto V = LevelPayoff::raw(Cara{3.0}, g);
  for (double mu : {0.0, 0.4, 0.9}) {
    CHECK(kernels::serial::surplus_curve(U, V, mu) == kernels::omp::surplus_curve(U, V, mu));
  }
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<std::vector<double>> curves(7, std::vector<double>(4000));
  for (auto& c : curves)
    for (auto& x : c) x = n(rng);
  const auto env = kernels::serial::lower_envelope(curves);
  CHECK(env == kernels::omp::lower_envelope(curves));
  for (std::size_t i = 0; i < env.size(); i += 97) {
    double m = curves[0][i];
    for (const auto& c : curves) m = std::min(m, c[i]);
    CHECK(env[i] == m);
  }
}
