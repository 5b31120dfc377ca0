#include "robreg/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>

#include "robreg/errors.hpp"
#include "robreg/kernels.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/mechanism.hpp"

namespace robreg {

PrincipalTree::PrincipalTree(DiscreteLearningProcess proc) : proc_(std::move(proc)) {}

PrincipalTree PrincipalTree::no_learning(Belief mu0, const LevelGrid& grid) {
  return PrincipalTree(robreg::no_learning(mu0, grid));
}

PrincipalTree PrincipalTree::full_revelation(Belief mu0, const LevelGrid& grid) {
  return PrincipalTree(robreg::full_revelation(mu0, grid));
}

PrincipalTree PrincipalTree::binomial(Belief mu0, const LevelGrid& grid, double q, std::size_t steps) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("signal accuracy must lie in [0, 1]");
  steps = std::min(steps, grid.size() - 1);
  const double m = mu0.value();
  // Belief after net d = ups - downs.
  auto belief = [&](long d) {
    const long u = std::max(d, 0L), v = std::max(-d, 0L);
    const double good = m * std::pow(q, static_cast<double>(u)) * std::pow(1.0 - q, static_cast<double>(v));
    const double bad =
        (1.0 - m) * std::pow(1.0 - q, static_cast<double>(u)) * std::pow(q, static_cast<double>(v));
    return good + bad > 0.0 ? good / (good + bad) : m;
  };
  std::vector<DiscreteLearningProcess::Layer> layers(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const std::size_t k = std::min(j, steps);
    for (std::size_t i = 0; i <= k; ++i) {
      const long d = 2 * static_cast<long>(i) - static_cast<long>(k);
      layers[j].push_back({belief(d), {}, std::nullopt});
    }
  }
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    for (std::size_t i = 0; i < layers[j].size(); ++i) {
      auto& node = layers[j][i];
      if (j >= steps) {
        node.children = {{i, 1.0}};
        continue;
      }
      const double up = node.belief * q + (1.0 - node.belief) * (1.0 - q);
      node.children.clear();
      if (up < 1.0) node.children.push_back({i, 1.0 - up});
      if (up > 0.0) node.children.push_back({i + 1, up});
    }
  }
  return PrincipalTree(DiscreteLearningProcess(grid, m, {{0, 1.0}}, std::move(layers)));
}

AdaptivePolicy solve_adaptive_quota(const PrincipalTree& tree, const PayoffSpec& agent,
                                    const PayoffSpec& principal) {
  const auto& proc = tree.process();
  const auto& layers = proc.layers();
  const LevelPayoff U = LevelPayoff::raw(agent, proc.grid());
  const LevelPayoff V = LevelPayoff::raw(principal, proc.grid());
  const double mu0 = proc.mu0();

  AdaptivePolicy pol{tree, {}, {}, 0.0, 0.0, mu0, {}};
  pol.stop_set.resize(layers.size());
  pol.node_value.resize(layers.size());
  for (std::size_t jj = layers.size(); jj-- > 0;) {
    pol.stop_set[jj].assign(layers[jj].size(), 1);
    pol.node_value[jj].assign(layers[jj].size(), 0.0);
    for (std::size_t i = 0; i < layers[jj].size(); ++i) {
      const auto& node = layers[jj][i];
      const double stop = kernels::joint_surplus(U, V, mu0, node.belief, jj);
      if (jj + 1 == layers.size()) {
        pol.node_value[jj][i] = stop;
        continue;
      }
      double cont = 0.0;
      for (const auto& e : node.children) cont += e.prob * pol.node_value[jj + 1][e.child];
      if (cont > stop) {
        pol.stop_set[jj][i] = 0;
        pol.node_value[jj][i] = cont;
      } else {
        pol.node_value[jj][i] = stop;
      }
    }
  }
  for (const auto& e : proc.root()) pol.value += e.prob * pol.node_value[0][e.child];

  std::map<std::pair<std::size_t, double>, double> acc;
  std::vector<double> mass(layers[0].size(), 0.0);
  for (const auto& e : proc.root()) mass[e.child] += e.prob;
  double expected_u = 0.0;
  for (std::size_t j = 0; j < layers.size(); ++j) {
    std::vector<double> next(j + 1 < layers.size() ? layers[j + 1].size() : 0, 0.0);
    for (std::size_t i = 0; i < layers[j].size(); ++i) {
      if (mass[i] == 0.0) continue;
      if (pol.stop_set[j][i]) {
        expected_u += mass[i] * U.at(layers[j][i].belief, j);
        acc[{j, layers[j][i].belief}] += mass[i];
      } else {
        for (const auto& e : layers[j][i].children) next[e.child] += mass[i] * e.prob;
      }
    }
    mass = std::move(next);
  }
  pol.lambda_adaptive = expected_u - U.at(mu0, 0);
  for (const auto& [key, m] : acc) pol.joint.push_back({key.first, proc.grid()[key.first], key.second, m});
  return pol;
}

namespace {

constexpr std::size_t kMaxLayerNodes = std::size_t{1} << 16;

}  // namespace

DiscreteLearningProcess refine_process(const PrincipalTree& tree,
                                       const std::vector<std::vector<Experiment>>& experiments) {
  const auto& proc = tree.process();
  const auto& tl = proc.layers();
  if (experiments.size() != tl.size()) throw NotARefinementError("one experiment list per level required");
  for (std::size_t j = 0; j < tl.size(); ++j) {
    if (experiments[j].size() != tl[j].size()) {
      throw NotARefinementError("experiment count differs from node count at level " + std::to_string(j));
    }
    for (const auto& x : experiments[j]) {
      if (!(x.q1 >= 0.0 && x.q1 <= 1.0 && x.q0 >= 0.0 && x.q0 <= 1.0)) {
        throw NotARefinementError("experiment probabilities must lie in [0, 1]");
      }
    }
  }

  // An agent state is a tree node plus the likelihood ratio r of the agent's own
  // signals; the belief is the tree belief reweighted by r. Keeping r instead of
  // the belief means paths that recombine in the tree meet in the same state.
  auto belief_of = [](double mu, double r) {
    if (r == 1.0 || mu <= 0.0 || mu >= 1.0) return mu;
    if (std::isinf(r)) return 1.0;
    return mu * r / (mu * r + (1.0 - mu));
  };
  // log r on a 1e-12 lattice; +-inf for revealing signals
  auto ratio_key = [](double r) -> std::int64_t {
    if (r == 0.0) return std::numeric_limits<std::int64_t>::min();
    if (std::isinf(r)) return std::numeric_limits<std::int64_t>::max();
    return std::llround(std::log(r) * 1e12);
  };
  auto likelihood = [](double p1, double p0) {
    return p0 > 0.0 ? p1 / p0 : std::numeric_limits<double>::infinity();
  };

  // From agent state (mu, r) along a tree edge of probability pi to a node of
  // belief mu2, then the experiment there. Returns (probability, new r) pairs.
  auto step = [&](double mu, double r, double pi, double mu2, const Experiment& x) {
    const double a = belief_of(mu, r);
    double p1 = pi, p0 = pi;
    if (mu > 0.0 && mu < 1.0) {
      p1 = pi * mu2 / mu;
      p0 = pi * (1.0 - mu2) / (1.0 - mu);
    }
    const double reach = a * p1 + (1.0 - a) * p0;
    std::vector<std::pair<double, double>> out;
    if (!x.informative()) {
      out.emplace_back(reach, r);
      return out;
    }
    const double a2 = belief_of(mu2, r);
    const double hi = a2 * x.q1 + (1.0 - a2) * x.q0;
    if (hi > 0.0) out.emplace_back(reach * hi, r == 0.0 ? 0.0 : r * likelihood(x.q1, x.q0));
    if (hi < 1.0) out.emplace_back(reach * (1.0 - hi), r == 0.0 ? 0.0 : r * likelihood(1.0 - x.q1, 1.0 - x.q0));
    return out;
  };

  using Key = std::pair<std::size_t, std::int64_t>;  // (tree node, quantized log r)
  std::vector<DiscreteLearningProcess::Layer> layers(tl.size());
  std::vector<std::map<Key, std::size_t>> index(tl.size());
  std::vector<std::map<Key, double>> ratio(tl.size());  // first r seen for each key

  // Collects the children of one agent state, creating next-layer nodes in tree order.
  auto expand = [&](std::size_t j, double mu, double r, const std::vector<Edge>& tree_edges,
                    std::vector<std::pair<Key, double>>& pending) {
    for (const auto& e : tree_edges) {
      if (e.prob <= 0.0) continue;
      const double mu2 = tl[j][e.child].belief;
      for (const auto& [p, r2] : step(mu, r, e.prob, mu2, experiments[j][e.child])) {
        if (p <= 0.0) continue;
        const Key key{e.child, ratio_key(r2)};
        ratio[j].try_emplace(key, r2);
        pending.push_back({key, p});
      }
    }
  };
  auto place = [&](std::size_t j, const std::vector<std::pair<Key, double>>& pending) {
    std::vector<Edge> edges;
    for (const auto& [key, p] : pending) {
      auto [it, fresh] = index[j].try_emplace(key, 0);
      if (fresh) it->second = index[j].size() - 1;  // provisional, renumbered below
      edges.push_back({it->second, p});
    }
    return edges;
  };

  // Pass 1: discover nodes layer by layer; pass 2 orders them by (tree node, belief);
  // within a tree node the belief increases with r.
  std::vector<std::vector<std::pair<Key, double>>> root_pending(1);
  expand(0, proc.mu0(), 1.0, proc.root(), root_pending[0]);
  std::vector<Edge> root = place(0, root_pending[0]);
  std::vector<std::vector<double>> node_ratio(tl.size());
  for (std::size_t j = 0; j < tl.size(); ++j) {
    // Renumber this layer in key order and remap edges that point into it.
    std::vector<std::size_t> remap(index[j].size());
    std::size_t pos = 0;
    for (auto& [key, id] : index[j]) {
      remap[id] = pos;
      id = pos++;
      node_ratio[j].push_back(ratio[j].at(key));
      layers[j].push_back({belief_of(tl[j][key.first].belief, node_ratio[j].back()), {}, key.first});
    }
    if (layers[j].size() > kMaxLayerNodes) {
      throw BudgetExceededError("refinement has " + std::to_string(layers[j].size()) +
                                " nodes at level " + std::to_string(j));
    }
    if (j == 0) {
      for (auto& e : root) e.child = remap[e.child];
    } else {
      for (auto& node : layers[j - 1]) {
        for (auto& e : node.children) e.child = remap[e.child];
      }
    }
    if (j + 1 == tl.size()) break;
    for (std::size_t i = 0; i < layers[j].size(); ++i) {
      auto& node = layers[j][i];
      std::vector<std::pair<Key, double>> pending;
      const auto& tnode = tl[j][*node.tag];
      expand(j + 1, tnode.belief, node_ratio[j][i], tnode.children, pending);
      node.children = place(j + 1, pending);
    }
  }
  // Merge duplicate edges to the same child.
  auto merge = [](std::vector<Edge>& edges) {
    std::map<std::size_t, double> m;
    for (const auto& e : edges) m[e.child] += e.prob;
    edges.clear();
    for (const auto& [c, p] : m) edges.push_back({c, p});
  };
  merge(root);
  for (auto& layer : layers) {
    for (auto& node : layer) merge(node.children);
  }
  try {
    return DiscreteLearningProcess(proc.grid(), proc.mu0(), std::move(root), std::move(layers));
  } catch (const DomainError& e) {
    throw NotARefinementError(std::string("refined process is not a learning process: ") + e.what());
  }
}

std::vector<std::vector<Experiment>> random_experiments(const PrincipalTree& tree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<Experiment>> out;
  for (const auto& layer : tree.process().layers()) {
    out.emplace_back();
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const double coin = unif(rng);
      const double q1 = unif(rng), q0 = unif(rng);
      out.back().push_back(coin < 0.5 ? Experiment{q1, q0} : Experiment{});
    }
  }
  return out;
}

AdaptiveEvaluation evaluate_adaptive(const AdaptivePolicy& policy,
                                     const DiscreteLearningProcess& agent_proc,
                                     const PayoffSpec& agent, const PayoffSpec& principal) {
  const auto& tree = policy.tree.process();
  const auto& tl = tree.layers();
  const auto& al = agent_proc.layers();
  if (al.size() != tl.size() || agent_proc.mu0() != tree.mu0()) {
    throw AlignmentError("agent process and principal tree differ in depth or prior");
  }
  // Every agent edge must follow a tree edge between the tagged nodes.
  auto tag = [&](std::size_t j, std::size_t i) -> std::size_t {
    const auto& t = al[j][i].tag;
    if (!t || *t >= tl[j].size()) {
      throw AlignmentError("agent node " + std::to_string(i) + " at level " + std::to_string(j) +
                           " is not tagged with a tree node");
    }
    return *t;
  };
  auto tree_edge = [&](const std::vector<Edge>& edges, std::size_t child) {
    return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.child == child; });
  };
  for (const auto& e : agent_proc.root()) {
    if (!tree_edge(tree.root(), tag(0, e.child))) throw AlignmentError("root edge leaves the tree");
  }
  std::vector<std::vector<char>> forced(al.size());
  for (std::size_t j = 0; j < al.size(); ++j) {
    forced[j].resize(al[j].size());
    for (std::size_t i = 0; i < al[j].size(); ++i) {
      const std::size_t t = tag(j, i);
      forced[j][i] = policy.stop_set[j][t];
      for (const auto& e : al[j][i].children) {
        if (!tree_edge(tl[j][t].children, tag(j + 1, e.child))) {
          throw AlignmentError("agent edge at level " + std::to_string(j) + " leaves the tree");
        }
      }
    }
  }

  const double lambda = policy.lambda_adaptive;
  const Mechanism tax = FixedTaxHardQuota{lambda, tree.grid().l_max()};
  const LevelPayoff U = LevelPayoff::adjusted(agent, tax, Side::agent, tree.grid());
  const double outside = agent.indirect(tree.mu0(), 0.0);
  const auto sol = solve_stopping(agent_proc, U, outside, &forced);

  AdaptiveEvaluation out;
  out.agent_root_value = sol.root_value;
  out.outside_option = outside;
  out.participation = sol.participation;
  if (!sol.participation) {
    out.value = principal.indirect(tree.mu0(), 0.0);
    return out;
  }
  const LevelPayoff V = LevelPayoff::raw(principal, tree.grid());
  for (const auto& a : sol.joint) out.value += a.mass * (V.at(a.belief, a.level_index) + lambda);
  return out;
}

}  // namespace robreg
