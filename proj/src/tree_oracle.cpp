#include "robreg/tree_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>

#include "robreg/errors.hpp"
#include "robreg/level_payoff.hpp"
#include "robreg/simplex.hpp"

namespace robreg {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

enum class Choice { free, stop_only, continue_only };

struct HNode {
  std::size_t layer = 0;
  double belief = 0.0;
  std::vector<std::size_t> children;
  std::size_t s = npos;  // stopping-mass variable
  std::size_t c = npos;  // continuation-mass variable
};

struct Instance {
  LevelGrid grid;  // the caller's grid
  std::size_t T = 0;
  double mu0 = 0.0;
  std::vector<std::vector<double>> supports;
  LevelPayoff U, V;
  double outside = 0.0, principal_outside = 0.0;
  bool escape = false;
  double scale = 1.0;
  std::vector<HNode> nodes;  // history tree, parents before children
  std::vector<std::size_t> layer0;
  std::vector<std::size_t> internal;  // nodes below the terminal level
};

Instance make_instance(const PayoffSpec& agent, const PayoffSpec& principal, const Mechanism& m,
                       const LevelGrid& grid, Belief mu0,
                       const std::vector<std::vector<double>>& supports) {
  if (grid.size() > kOracleMaxLevels) {
    throw BudgetExceededError("tree oracle limited to " + std::to_string(kOracleMaxLevels) +
                              " levels, got " + std::to_string(grid.size()));
  }
  if (supports.size() != grid.size()) throw DomainError("one belief support per level required");
  for (const auto& s : supports) {
    if (s.empty() || s.size() > kOracleMaxBeliefs) {
      throw BudgetExceededError("tree oracle limited to " + std::to_string(kOracleMaxBeliefs) +
                                " beliefs per level, got " + std::to_string(s.size()));
    }
    for (double b : s) Belief{b};
  }
  Instance in{grid,
              terminal_level(transfers_on_grid(m, grid)),
              mu0.value(),
              supports,
              LevelPayoff::adjusted(agent, m, Side::agent, grid),
              LevelPayoff::adjusted(principal, m, Side::principal, grid),
              agent.indirect(mu0.value(), 0.0),
              principal.indirect(mu0.value(), 0.0),
              false,
              1.0,
              {},
              {},
              {}};
  in.scale = in.U.scale();
  double best = in.U.at(in.mu0, 0);
  for (std::size_t j = 1; j <= in.T; ++j) best = std::max(best, in.U.at(in.mu0, j));
  in.escape = best < in.outside - 1e-9 * std::max(1.0, std::abs(in.outside));

  std::vector<std::size_t> frontier;
  for (double b : supports[0]) {
    in.nodes.push_back({0, b, {}, npos, npos});
    frontier.push_back(in.nodes.size() - 1);
  }
  in.layer0 = frontier;
  for (std::size_t j = 1; j <= in.T; ++j) {
    std::vector<std::size_t> next;
    for (std::size_t p : frontier) {
      for (double b : supports[j]) {
        in.nodes.push_back({j, b, {}, npos, npos});
        in.nodes[p].children.push_back(in.nodes.size() - 1);
        next.push_back(in.nodes.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  for (std::size_t n = 0; n < in.nodes.size(); ++n) {
    if (in.nodes[n].layer < in.T) in.internal.push_back(n);
  }
  return in;
}

bool stop_compatible(const Instance& in, double b, std::size_t j) {
  const double here = in.U.at(b, j);
  for (std::size_t s = j + 1; s <= in.T; ++s) {
    if (in.U.at(b, s) > here + 1e-12 * in.scale) return false;
  }
  return true;
}

struct Built {
  LpProblem lp;
  std::vector<HNode> nodes;
  std::vector<std::size_t> interior_positive;  // stop variables before T at beliefs > 0
  std::vector<double> value_coef;              // V^phi per variable
};

Built build_lp(const Instance& in, const std::vector<Choice>& choice) {
  Built out;
  out.nodes = in.nodes;
  std::size_t nvar = 0;
  std::size_t internal_k = 0;
  for (auto& n : out.nodes) {
    if (n.layer == in.T) {
      n.s = nvar++;
      continue;
    }
    const Choice ch = choice.empty() ? Choice::free : choice[internal_k];
    ++internal_k;
    if (ch != Choice::continue_only && stop_compatible(in, n.belief, n.layer)) n.s = nvar++;
    if (ch != Choice::stop_only) n.c = nvar++;
  }
  auto zero = [&] { return std::vector<double>(nvar, 0.0); };
  auto add_mass = [&](std::vector<double>& a, const HNode& n, double w) {
    if (n.s != npos) a[n.s] += w;
    if (n.c != npos) a[n.c] += w;
  };

  out.lp.c = zero();
  out.value_coef = zero();
  std::vector<double> agent_u = zero();
  for (const auto& n : out.nodes) {
    if (n.s == npos) continue;
    out.value_coef[n.s] = in.V.at(n.belief, n.layer);
    agent_u[n.s] = in.U.at(n.belief, n.layer);
    if (n.layer < in.T && n.belief > 1e-12) out.interior_positive.push_back(n.s);
  }
  out.lp.c = out.value_coef;

  {
    auto total = zero(), mean = zero();
    for (std::size_t i : in.layer0) {
      add_mass(total, out.nodes[i], 1.0);
      add_mass(mean, out.nodes[i], out.nodes[i].belief);
    }
    out.lp.rows.push_back({total, Sense::eq, 1.0});
    out.lp.rows.push_back({mean, Sense::eq, in.mu0});
  }
  for (std::size_t idx = 0; idx < out.nodes.size(); ++idx) {
    const HNode& n = out.nodes[idx];
    if (n.layer == in.T) continue;
    auto total = zero(), mean = zero();
    for (std::size_t ch : n.children) {
      add_mass(total, out.nodes[ch], 1.0);
      add_mass(mean, out.nodes[ch], out.nodes[ch].belief);
    }
    if (n.c != npos) {
      total[n.c] -= 1.0;
      mean[n.c] -= n.belief;
    }
    out.lp.rows.push_back({total, Sense::eq, 0.0});
    out.lp.rows.push_back({mean, Sense::eq, 0.0});
    if (n.c == npos) continue;
    // Following the recommendation beats stopping on the continuation part.
    auto obey = zero();
    std::vector<std::size_t> stack(n.children.begin(), n.children.end());
    while (!stack.empty()) {
      const HNode& d = out.nodes[stack.back()];
      stack.pop_back();
      if (d.s != npos) obey[d.s] += agent_u[d.s];
      stack.insert(stack.end(), d.children.begin(), d.children.end());
    }
    obey[n.c] -= in.U.at(n.belief, n.layer);
    out.lp.rows.push_back({obey, Sense::ge, 0.0});
  }
  out.lp.rows.push_back(
      {agent_u, Sense::ge, in.outside - 1e-12 * std::max(1.0, std::abs(in.outside))});
  return out;
}

// Worst value of one LP after the participation escape; +inf when infeasible.
double lp_worst(const Instance& in, const Built& b, LpResult* out = nullptr) {
  const LpResult res = solve_lp(b.lp);
  if (out) *out = res;
  if (res.status != LpStatus::optimal) {
    return in.escape ? in.principal_outside : std::numeric_limits<double>::infinity();
  }
  return in.escape ? std::min(res.objective, in.principal_outside) : res.objective;
}

DiscreteLearningProcess rebuild_process(const Instance& in, const Built& b,
                                        const std::vector<double>& x) {
  const std::size_t depth = in.grid.size();
  std::vector<DiscreteLearningProcess::Layer> layers(depth);
  // Position of each node's stop copy and continue copy in its layer.
  std::vector<std::size_t> stop_pos(b.nodes.size(), npos), cont_pos(b.nodes.size(), npos);
  // Masses below 1e-12 are LP noise.
  auto mass = [&](std::size_t var) { return var == npos || x[var] <= 1e-12 ? 0.0 : x[var]; };
  std::vector<std::map<double, std::size_t>> frozen(depth);

  auto frozen_at = [&](std::size_t j, double belief) {
    auto it = frozen[j].find(belief);
    if (it != frozen[j].end()) return it->second;
    layers[j].push_back({belief, {}, std::nullopt});
    frozen[j][belief] = layers[j].size() - 1;
    return layers[j].size() - 1;
  };

  for (std::size_t idx = 0; idx < b.nodes.size(); ++idx) {
    const HNode& n = b.nodes[idx];
    if (mass(n.s) > 0.0) {
      layers[n.layer].push_back({n.belief, {}, std::nullopt});
      stop_pos[idx] = layers[n.layer].size() - 1;
    }
    if (mass(n.c) > 0.0) {
      layers[n.layer].push_back({n.belief, {}, std::nullopt});
      cont_pos[idx] = layers[n.layer].size() - 1;
    }
  }
  auto normalise = [](std::vector<Edge>& edges) {
    double t = 0.0;
    for (const auto& e : edges) t += e.prob;
    for (auto& e : edges) e.prob /= t;
  };
  // Mixes in a point mass on one child so the children average exactly to b;
  // LP round-off is amplified when a node's mass is tiny.
  auto recentre = [&](std::vector<Edge>& edges, std::size_t next, double b) {
    double mean = 0.0;
    for (const auto& e : edges) mean += e.prob * layers[next][e.child].belief;
    if (mean == b) return true;
    std::size_t k = edges.size();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const double bi = layers[next][edges[i].child].belief;
      if ((mean > b && bi <= b) || (mean < b && bi >= b)) {
        if (k == edges.size() || std::abs(bi - b) > std::abs(layers[next][edges[k].child].belief - b)) k = i;
      }
    }
    if (k == edges.size()) return false;
    const double bk = layers[next][edges[k].child].belief;
    const double t = (mean - b) / (mean - bk);
    for (auto& e : edges) e.prob *= 1.0 - t;
    edges[k].prob += t;
    return true;
  };
  auto child_edges = [&](const std::vector<std::size_t>& kids) {
    std::vector<Edge> edges;
    for (std::size_t ch : kids) {
      if (stop_pos[ch] != npos) edges.push_back({stop_pos[ch], mass(b.nodes[ch].s)});
      if (cont_pos[ch] != npos) edges.push_back({cont_pos[ch], mass(b.nodes[ch].c)});
    }
    return edges;
  };
  std::vector<Edge> root = child_edges(in.layer0);
  normalise(root);
  recentre(root, 0, in.mu0);
  // Stopped mass carries its belief unchanged to the last layer.
  for (std::size_t j = 0; j + 1 < depth; ++j) {
    for (std::size_t i = 0; i < layers[j].size(); ++i) {
      if (!layers[j][i].children.empty()) continue;
      bool is_cont = false;
      for (std::size_t idx = 0; idx < b.nodes.size(); ++idx) {
        if (b.nodes[idx].layer == j && cont_pos[idx] == i) {
          auto edges = child_edges(b.nodes[idx].children);
          if (!edges.empty()) {
            normalise(edges);
            if (recentre(edges, j + 1, layers[j][i].belief)) {
              layers[j][i].children = std::move(edges);
              is_cont = true;
            }
          }
          break;
        }
      }
      if (!is_cont) layers[j][i].children = {{frozen_at(j + 1, layers[j][i].belief), 1.0}};
    }
  }
  return {in.grid, in.mu0, std::move(root), std::move(layers)};
}

}  // namespace

TreeOracleResult tree_oracle_worst_case(const PayoffSpec& agent, const PayoffSpec& principal,
                                        const Mechanism& m, const LevelGrid& small_grid, Belief mu0,
                                        const std::vector<std::vector<double>>& supports) {
  const Instance in = make_instance(agent, principal, m, small_grid, mu0, supports);
  const Built b = build_lp(in, {});
  LpResult res;
  TreeOracleResult out;
  out.history_nodes = in.nodes.size();
  out.value = lp_worst(in, b, &res);
  if (res.status != LpStatus::optimal) {
    if (!in.escape) {
      throw InfeasibleError("no participating tree on this support (most violated row " +
                            std::to_string(res.worst_row) + ")");
    }
    out.lp_value = std::numeric_limits<double>::quiet_NaN();
    out.escaped = true;
    return out;
  }
  out.lp_value = res.objective;
  out.escaped = out.value < out.lp_value;

  for (std::size_t v : b.interior_positive) out.interior_positive_mass += res.x[v];

  // Largest interior positive-belief stopping mass among optimal trees.
  if (!b.interior_positive.empty()) {
    Built second = b;
    second.lp.rows.push_back({b.value_coef, Sense::le,
                              res.objective + 1e-9 * std::max(1.0, std::abs(res.objective))});
    second.lp.c.assign(b.value_coef.size(), 0.0);
    for (std::size_t v : b.interior_positive) second.lp.c[v] = -1.0;
    const LpResult r2 = solve_lp(second.lp);
    out.max_interior_positive_mass =
        r2.status == LpStatus::optimal ? -r2.objective : out.interior_positive_mass;
  }

  std::map<std::pair<std::size_t, double>, double> acc;
  for (const auto& n : b.nodes) {
    if (n.s != npos && res.x[n.s] > 0.0) acc[{n.layer, n.belief}] += res.x[n.s];
  }
  for (const auto& [key, mass] : acc) {
    out.joint.push_back({key.first, small_grid[key.first], key.second, mass});
  }
  try {
    out.process = rebuild_process(in, b, res.x);
  } catch (const DomainError&) {
    // Left empty when round-off defeats the martingale check; value and joint stand.
  }
  return out;
}

TreeOracleResult tree_oracle_worst_case(const PayoffSpec& agent, const PayoffSpec& principal,
                                        const Mechanism& m, const LevelGrid& small_grid, Belief mu0,
                                        const std::vector<double>& support) {
  return tree_oracle_worst_case(agent, principal, m, small_grid, mu0,
                                std::vector<std::vector<double>>(small_grid.size(), support));
}

double tree_oracle_enumerate(const PayoffSpec& agent, const PayoffSpec& principal, const Mechanism& m,
                             const LevelGrid& small_grid, Belief mu0,
                             const std::vector<std::vector<double>>& supports) {
  const Instance in = make_instance(agent, principal, m, small_grid, mu0, supports);
  const std::size_t k = in.internal.size();
  if (k > kPatternMaxNodes) {
    throw BudgetExceededError("pattern enumeration limited to " + std::to_string(kPatternMaxNodes) +
                              " internal nodes, got " + std::to_string(k));
  }
  const std::int64_t patterns = std::int64_t{1} << k;
  std::vector<double> values(static_cast<std::size_t>(patterns));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t p = 0; p < patterns; ++p) {
    std::vector<Choice> choice(k);
    for (std::size_t i = 0; i < k; ++i) {
      choice[i] = (p >> i) & 1 ? Choice::continue_only : Choice::stop_only;
    }
    values[static_cast<std::size_t>(p)] = lp_worst(in, build_lp(in, choice));
  }
  return *std::min_element(values.begin(), values.end());
}

}  // namespace robreg
