// Serial reference vs OpenMP variant for each parallel kernel.
#include <benchmark/benchmark.h>

#include <random>

#include "robreg/kernels.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/robust.hpp"
#include "robreg/stopping.hpp"
#include "robreg/worstcase.hpp"

using namespace robreg;

namespace {

std::vector<double> beliefs(std::size_t n) {
  std::vector<double> b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = static_cast<double>(k) / static_cast<double>(n - 1);
  return b;
}

template <bool Omp>
void one_shot(benchmark::State& st) {
  const LevelGrid g(2.0, static_cast<std::size_t>(st.range(0)));
  const auto f = LevelPayoff::raw(Cara{1.0}, g);
  const auto b = beliefs(1001);
  for (auto _ : st) {
    auto r = Omp ? kernels::omp::one_shot_levels(f, b) : kernels::serial::one_shot_levels(f, b);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Omp>
void surplus(benchmark::State& st) {
  const LevelGrid g(2.0, static_cast<std::size_t>(st.range(0)));
  const auto U = LevelPayoff::raw(Cara{1.0}, g);
  const auto V = LevelPayoff::raw(Cara{3.0}, g);
  for (auto _ : st) {
    auto r = Omp ? kernels::omp::surplus_curve(U, V, 0.7) : kernels::serial::surplus_curve(U, V, 0.7);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Omp>
void envelope(benchmark::State& st) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<std::vector<double>> curves(8, std::vector<double>(static_cast<std::size_t>(st.range(0))));
  for (auto& c : curves)
    for (auto& x : c) x = n(rng);
  for (auto _ : st) {
    auto r = Omp ? kernels::omp::lower_envelope(curves) : kernels::serial::lower_envelope(curves);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Omp>
void paths(benchmark::State& st) {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(2.0, 401);
  const auto p = indifference_G(cp.agent, cp.principal, ZeroTax{}, Belief(0.6), g).worst.process.as_process();
  const auto sol = solve_stopping(p, cp.agent, ZeroTax{});
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) {
    auto r = Omp ? kernels::omp::simulate_paths(p, sol, n, 1) : kernels::serial::simulate_paths(p, sol, n, 1);
    benchmark::DoNotOptimize(r);
  }
}

template <bool Omp>
void trees(benchmark::State& st) {
  const auto cp = cara_pair(1.0, 3.0);
  const LevelGrid g(1.0, 20);
  const auto r = compute_robust(cp.agent, cp.principal, Belief(0.7), g);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(st.range(0)));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
  for (auto _ : st) {
    auto v = Omp ? kernels::omp::random_tree_values(cp.agent, cp.principal, r.mechanism, Belief(0.7), g, seeds, 4)
                 : kernels::serial::random_tree_values(cp.agent, cp.principal, r.mechanism, Belief(0.7), g, seeds, 4);
    benchmark::DoNotOptimize(v);
  }
}

}  // namespace

BENCHMARK(one_shot<false>)->Arg(2001)->Arg(20001)->Name("one_shot_levels/serial");
BENCHMARK(one_shot<true>)->Arg(2001)->Arg(20001)->Name("one_shot_levels/omp");
BENCHMARK(surplus<false>)->Arg(20001)->Arg(200001)->Name("surplus_curve/serial");
BENCHMARK(surplus<true>)->Arg(20001)->Arg(200001)->Name("surplus_curve/omp");
BENCHMARK(envelope<false>)->Arg(20001)->Arg(200001)->Name("lower_envelope/serial");
BENCHMARK(envelope<true>)->Arg(20001)->Arg(200001)->Name("lower_envelope/omp");
BENCHMARK(paths<false>)->Arg(100000)->Name("simulate_paths/serial");
BENCHMARK(paths<true>)->Arg(100000)->Name("simulate_paths/omp");
BENCHMARK(trees<false>)->Arg(200)->Name("random_tree_values/serial");
BENCHMARK(trees<true>)->Arg(200)->Name("random_tree_values/omp");

BENCHMARK_MAIN();
