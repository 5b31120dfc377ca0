#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "robreg/grid.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/payoff.hpp"

namespace robreg {

/// Principal tree for the adaptive command.
struct TreeSpec {
  std::string type = "no_learning";  // no_learning | full_revelation | binomial
  double q = 0.7;
  std::optional<std::size_t> steps;
};

/// Mechanism entry; "robust" is resolved to the max-min mechanism at run time.
struct MechanismSpec {
  bool robust = false;
  Mechanism mechanism;
  std::string label;
};

struct RunConfig {
  PayoffSpec agent{Quadratic{}};
  PayoffSpec principal{Quadratic{}};
  MechanismSpec mechanism;
  double l_max = 1.0;
  std::size_t n = 2;
  std::size_t n_mu = 1001;
  double mu0 = 0.5;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  // gap sweep
  std::vector<MechanismSpec> gap_mechanisms;
  std::vector<double> gap_l_max;

  // adaptive
  TreeSpec tree;
  std::size_t refinements = 50;

  double tolerance = 1e-8;

  LevelGrid grid() const { return {l_max, n}; }
  BeliefGrid belief_grid() const { return BeliefGrid(n_mu); }
  /// Throws ConfigError when the seed is missing.
  std::uint64_t require_seed() const;
};

/// Validates the document; unknown keys, missing required keys and out-of-range
/// values raise ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

PayoffSpec parse_payoff(const nlohmann::json& j, const LevelGrid& grid, const std::string& where);
MechanismSpec parse_mechanism(const nlohmann::json& j, const LevelGrid& grid, const std::string& where);

/// A JSON list of agent payoffs, or {"members": [...]}.
std::vector<PayoffSpec> load_ambiguity(const std::filesystem::path& path, const LevelGrid& grid);

}  // namespace robreg
