#include "robreg/process.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "robreg/errors.hpp"

namespace robreg {

namespace {

constexpr double kRowTol = 1e-12;
constexpr double kMartingaleTol = 1e-10;

void check_edges(const std::vector<Edge>& edges, double belief, std::size_t next_size,
                 const std::vector<ProcessNode>& next, const std::string& where) {
  if (edges.empty()) throw DomainError(where + ": node has no children");
  double total = 0.0, mean = 0.0;
  for (const auto& e : edges) {
    if (e.child >= next_size) throw DomainError(where + ": child index out of range");
    if (!(e.prob >= 0.0)) throw DomainError(where + ": negative transition probability");
    total += e.prob;
    mean += e.prob * next[e.child].belief;
  }
  if (std::abs(total - 1.0) > kRowTol) {
    throw DomainError(where + ": transition probabilities sum to " + std::to_string(total));
  }
  if (std::abs(mean - belief) > kMartingaleTol) {
    throw DomainError(where + ": expected child belief " + std::to_string(mean) +
                      " differs from " + std::to_string(belief));
  }
}

}  // namespace

DiscreteLearningProcess::DiscreteLearningProcess(LevelGrid grid, double mu0, std::vector<Edge> root,
                                                 std::vector<Layer> layers)
    : grid_(std::move(grid)), mu0_(Belief(mu0).value()), root_(std::move(root)),
      layers_(std::move(layers)) {
  if (layers_.size() != grid_.size()) {
    throw DomainError("process needs one layer per grid level");
  }
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    if (layers_[j].empty()) throw DomainError("empty layer " + std::to_string(j));
    for (const auto& node : layers_[j]) Belief{node.belief};
  }
  check_edges(root_, mu0_, layers_[0].size(), layers_[0], "root");
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    const bool last = j + 1 == layers_.size();
    for (std::size_t i = 0; i < layers_[j].size(); ++i) {
      const auto& node = layers_[j][i];
      const std::string where = "layer " + std::to_string(j) + " node " + std::to_string(i);
      if (last) {
        if (!node.children.empty()) throw DomainError(where + ": last layer cannot branch");
        continue;
      }
      check_edges(node.children, node.belief, layers_[j + 1].size(), layers_[j + 1], where);
    }
  }
}

std::size_t DiscreteLearningProcess::node_count() const noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.size();
  return n;
}

std::vector<std::vector<double>> DiscreteLearningProcess::reach_probabilities() const {
  std::vector<std::vector<double>> mass(layers_.size());
  for (std::size_t j = 0; j < layers_.size(); ++j) mass[j].assign(layers_[j].size(), 0.0);
  for (const auto& e : root_) mass[0][e.child] += e.prob;
  for (std::size_t j = 0; j + 1 < layers_.size(); ++j) {
    for (std::size_t i = 0; i < layers_[j].size(); ++i) {
      for (const auto& e : layers_[j][i].children) mass[j + 1][e.child] += mass[j][i] * e.prob;
    }
  }
  return mass;
}

DiscreteLearningProcess no_learning(Belief mu0, const LevelGrid& grid) {
  std::vector<DiscreteLearningProcess::Layer> layers(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    ProcessNode node{mu0.value(), {}, std::nullopt};
    if (j + 1 < grid.size()) node.children = {{0, 1.0}};
    layers[j] = {node};
  }
  return {grid, mu0.value(), {{0, 1.0}}, std::move(layers)};
}

DiscreteLearningProcess level0_split(Belief mu0, double lo, double hi, const LevelGrid& grid) {
  const double m = mu0.value();
  if (!(0.0 <= lo && lo <= m && m <= hi && hi <= 1.0)) {
    throw DomainError("split beliefs must bracket the prior");
  }
  if (lo == hi) return no_learning(mu0, grid);
  const double p_hi = (m - lo) / (hi - lo);
  std::vector<DiscreteLearningProcess::Layer> layers(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    ProcessNode a{lo, {}, std::nullopt}, b{hi, {}, std::nullopt};
    if (j + 1 < grid.size()) {
      a.children = {{0, 1.0}};
      b.children = {{1, 1.0}};
    }
    layers[j] = {a, b};
  }
  return {grid, m, {{0, 1.0 - p_hi}, {1, p_hi}}, std::move(layers)};
}

DiscreteLearningProcess full_revelation(Belief mu0, const LevelGrid& grid) {
  return level0_split(mu0, 0.0, 1.0, grid);
}

DiscreteLearningProcess bad_news_process(Belief mu0, const std::vector<double>& g,
                                         const LevelGrid& grid) {
  const double m = mu0.value();
  if (g.size() != grid.size()) throw DomainError("bad-news increments must match the grid");
  double total = 0.0;
  for (double x : g) {
    if (!(x >= 0.0)) throw DomainError("bad-news increments must be nonnegative");
    total += x;
  }
  if (total > 1.0 - m + 1e-12) throw DomainError("bad-news mass exceeds 1 - mu0");
  if (m == 0.0) return no_learning(mu0, grid);

  // Node 0 carries belief 0, node 1 the continuation belief.
  std::vector<DiscreteLearningProcess::Layer> layers(grid.size());
  double G = 0.0;
  std::vector<double> survive(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    G = std::min(G + g[j], 1.0 - m);
    survive[j] = 1.0 - G;
    layers[j] = {ProcessNode{0.0, {}, std::nullopt},
                 ProcessNode{std::min(m / survive[j], 1.0), {}, std::nullopt}};
  }
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double p = std::clamp(1.0 - survive[j + 1] / survive[j], 0.0, 1.0);
    layers[j][0].children = {{0, 1.0}};
    layers[j][1].children = {{0, p}, {1, 1.0 - p}};
  }
  const double p0 = std::clamp(1.0 - survive[0], 0.0, 1.0);
  return {grid, m, {{0, p0}, {1, 1.0 - p0}}, std::move(layers)};
}

DiscreteLearningProcess random_tree(Belief mu0, const LevelGrid& grid, std::size_t max_beliefs,
                                    std::uint64_t seed) {
  if (max_beliefs < 2) throw DomainError("random trees need at least two beliefs per layer");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> count(1, max_beliefs);

  // Children of one parent: a random support value at or below it and one at or above it.
  auto split = [&](double p, const std::vector<double>& support) {
    std::vector<std::size_t> below, above;
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i] <= p) below.push_back(i);
      if (support[i] >= p) above.push_back(i);
    }
    const std::size_t a = below[std::uniform_int_distribution<std::size_t>(0, below.size() - 1)(rng)];
    const std::size_t b = above[std::uniform_int_distribution<std::size_t>(0, above.size() - 1)(rng)];
    if (a == b) return std::vector<Edge>{{a, 1.0}};
    const double q = (p - support[a]) / (support[b] - support[a]);
    return std::vector<Edge>{{a, 1.0 - q}, {b, q}};
  };

  std::vector<double> parents{mu0.value()};
  std::vector<Edge> root;
  std::vector<DiscreteLearningProcess::Layer> layers(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto [lo_it, hi_it] = std::minmax_element(parents.begin(), parents.end());
    const double plo = *lo_it, phi = *hi_it;
    std::size_t k = count(rng);
    std::vector<double> support;
    if (k == 1 && plo == phi) {
      support = {plo};
    } else {
      k = std::max<std::size_t>(k, 2);
      const double r = unif(rng);
      const double lo = r < 0.25 ? 0.0 : plo * unif(rng);
      const double s = unif(rng);
      const double hi = s < 0.25 ? 1.0 : phi + (1.0 - phi) * unif(rng);
      support = {lo, hi};
      for (std::size_t e = 2; e < k; ++e) support.push_back(lo + (hi - lo) * unif(rng));
      std::sort(support.begin(), support.end());
      support.erase(std::unique(support.begin(), support.end()), support.end());
    }
    layers[j].reserve(support.size());
    for (double b : support) layers[j].push_back(ProcessNode{b, {}, std::nullopt});
    if (j == 0) {
      root = split(mu0.value(), support);
    } else {
      for (auto& node : layers[j - 1]) node.children = split(node.belief, support);
    }
    parents = support;
  }
  return {grid, mu0.value(), std::move(root), std::move(layers)};
}

namespace {
nlohmann::json edges_json(const std::vector<Edge>& edges) {
  auto out = nlohmann::json::array();
  for (const auto& e : edges) out.push_back({e.child, e.prob});
  return out;
}
std::vector<Edge> edges_from(const nlohmann::json& j) {
  std::vector<Edge> out;
  for (const auto& e : j) out.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>()});
  return out;
}
}  // namespace

nlohmann::json to_json(const DiscreteLearningProcess& p) {
  nlohmann::json out;
  out["grid"] = {{"l_max", p.grid().l_max()}, {"n", p.grid().size()}};
  out["mu0"] = p.mu0();
  out["root"] = edges_json(p.root());
  auto layers = nlohmann::json::array();
  for (const auto& layer : p.layers()) {
    auto nodes = nlohmann::json::array();
    for (const auto& node : layer) {
      nlohmann::json n{{"belief", node.belief}, {"children", edges_json(node.children)}};
      if (node.tag) n["tag"] = *node.tag;
      nodes.push_back(std::move(n));
    }
    layers.push_back(std::move(nodes));
  }
  out["layers"] = std::move(layers);
  return out;
}

DiscreteLearningProcess process_from_json(const nlohmann::json& j) {
  try {
    LevelGrid grid(j.at("grid").at("l_max").get<double>(), j.at("grid").at("n").get<std::size_t>());
    std::vector<DiscreteLearningProcess::Layer> layers;
    for (const auto& layer : j.at("layers")) {
      DiscreteLearningProcess::Layer nodes;
      for (const auto& n : layer) {
        ProcessNode node{n.at("belief").get<double>(), edges_from(n.at("children")), std::nullopt};
        if (n.contains("tag")) node.tag = n.at("tag").get<std::size_t>();
        nodes.push_back(std::move(node));
      }
      layers.push_back(std::move(nodes));
    }
    return {grid, j.at("mu0").get<double>(), edges_from(j.at("root")), std::move(layers)};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed process: ") + e.what());
  }
}

}  // namespace robreg
