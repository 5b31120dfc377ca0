#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "robreg/grid.hpp"

namespace robreg {

struct Edge {
  std::size_t child = 0;  // index into the next layer
  double prob = 0.0;
};

struct ProcessNode {
  double belief = 0.0;
  std::vector<Edge> children;      // empty on the last layer
  std::optional<std::size_t> tag;  // aligned principal node, for refinements
};

/**
 * Belief martingale on a level grid as a layered tree.
 *
 * Layer j holds the possible beliefs at level l_j. The prior mu0 splits into
 * layer 0 through the root edges, so information may arrive at level 0. Nodes
 * may share children (recombining trees).
 */
class DiscreteLearningProcess {
 public:
  using Layer = std::vector<ProcessNode>;

  /// Validates kernel rows (sum to 1 within 1e-12) and the martingale property (1e-10).
  DiscreteLearningProcess(LevelGrid grid, double mu0, std::vector<Edge> root,
                          std::vector<Layer> layers);

  const LevelGrid& grid() const noexcept { return grid_; }
  double mu0() const noexcept { return mu0_; }
  const std::vector<Edge>& root() const noexcept { return root_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& layer(std::size_t j) const { return layers_.at(j); }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t node_count() const noexcept;

  /// Probability of reaching every node when nobody stops.
  std::vector<std::vector<double>> reach_probabilities() const;

 private:
  LevelGrid grid_;
  double mu0_;
  std::vector<Edge> root_;
  std::vector<Layer> layers_;
};

/// Belief mu0 at every level.
DiscreteLearningProcess no_learning(Belief mu0, const LevelGrid& grid);

/// The state is revealed at level 0 (beliefs 0 and 1), nothing afterwards.
DiscreteLearningProcess full_revelation(Belief mu0, const LevelGrid& grid);

/// A single split at level 0 to beliefs lo <= mu0 <= hi, no information afterwards.
DiscreteLearningProcess level0_split(Belief mu0, double lo, double hi, const LevelGrid& grid);

/**
 * Bad-news process in the compact two-node form {0, lambda_j}.
 *
 * `g[j]` is the mass of bad news arriving at level j (in the bad state); the
 * continuation belief is mu0/(1 - G(l_j)). The increments must be nonnegative
 * and sum to at most 1 - mu0.
 */
DiscreteLearningProcess bad_news_process(Belief mu0, const std::vector<double>& g,
                                         const LevelGrid& grid);

/// Random layered tree with at most `max_beliefs` beliefs per layer (seeded).
DiscreteLearningProcess random_tree(Belief mu0, const LevelGrid& grid, std::size_t max_beliefs,
                                    std::uint64_t seed);

nlohmann::json to_json(const DiscreteLearningProcess& p);
DiscreteLearningProcess process_from_json(const nlohmann::json& j);

}  // namespace robreg
