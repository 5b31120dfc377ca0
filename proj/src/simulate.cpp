#include <algorithm>
#include <map>
#include <random>

#include "robreg/errors.hpp"
#include "robreg/stopping.hpp"

namespace robreg {

namespace {

std::size_t stride_of(const DiscreteLearningProcess& proc) {
  std::size_t s = 1;
  for (const auto& layer : proc.layers()) s = std::max(s, layer.size());
  return s;
}

std::size_t draw(const std::vector<Edge>& edges, double u) {
  double acc = 0.0;
  for (const auto& e : edges) {
    acc += e.prob;
    if (u < acc) return e.child;
  }
  // u beyond the rounded total: last edge with positive probability.
  for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
    if (it->prob > 0.0) return it->child;
  }
  return edges.back().child;
}

std::uint64_t run_path(const DiscreteLearningProcess& proc, const StoppingSolution& sol,
                       std::size_t stride, std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t node = draw(proc.root(), unif(rng));
  std::size_t j = 0;
  while (!sol.stop[j][node]) {
    node = draw(proc.layer(j).at(node).children, unif(rng));
    ++j;
  }
  return static_cast<std::uint64_t>(j) * stride + node;
}

}  // namespace

namespace kernels::serial {
std::vector<std::uint64_t> simulate_paths(const DiscreteLearningProcess& proc,
                                          const StoppingSolution& sol, std::size_t n_paths,
                                          std::uint64_t seed) {
  const std::size_t stride = stride_of(proc);
  std::vector<std::uint64_t> out(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) out[p] = run_path(proc, sol, stride, seed, p);
  return out;
}
}  // namespace kernels::serial

namespace kernels::omp {
std::vector<std::uint64_t> simulate_paths(const DiscreteLearningProcess& proc,
                                          const StoppingSolution& sol, std::size_t n_paths,
                                          std::uint64_t seed) {
  const std::size_t stride = stride_of(proc);
  std::vector<std::uint64_t> out(n_paths);
  const auto n = static_cast<std::int64_t>(n_paths);
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) {
    out[static_cast<std::size_t>(p)] =
        run_path(proc, sol, stride, seed, static_cast<std::uint64_t>(p));
  }
  return out;
}
}  // namespace kernels::omp

EmpiricalJoint simulate(const DiscreteLearningProcess& proc, const StoppingSolution& sol,
                        std::size_t n_paths, std::uint64_t seed) {
  if (n_paths == 0) throw DomainError("simulation needs at least one path");
  if (sol.stop.size() != proc.depth()) throw DomainError("solution does not belong to the process");
  const std::size_t stride = stride_of(proc);
  const auto ends = kernels::omp::simulate_paths(proc, sol, n_paths, seed);

  std::map<std::uint64_t, std::size_t> counts;
  for (auto e : ends) ++counts[e];
  std::map<std::pair<std::size_t, double>, std::size_t> merged;
  for (const auto& [code, c] : counts) {
    const std::size_t j = code / stride, i = code % stride;
    merged[{j, proc.layer(j)[i].belief}] += c;
  }
  EmpiricalJoint out;
  out.n_paths = n_paths;
  for (const auto& [key, c] : merged) {
    out.atoms.push_back({key.first, proc.grid()[key.first], key.second,
                         static_cast<double>(c) / static_cast<double>(n_paths)});
  }
  return out;
}

}  // namespace robreg
