#include "robreg/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "robreg/errors.hpp"

namespace robreg {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + where + "." + key + "'");
  }
}

const json& need(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing key '" + where + "." + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError("'" + where + "' must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + where + "' must be finite");
  return x;
}

double number_or(const json& j, const std::string& key, double def, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : def;
}

std::size_t count(const json& j, const std::string& where, std::size_t lo, std::size_t hi) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError("'" + where + "' must be a nonnegative integer");
  }
  const auto v = j.get<std::size_t>();
  if (v < lo || v > hi) {
    throw ConfigError("'" + where + "' = " + std::to_string(v) + " outside [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }
  return v;
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError("'" + where + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError("'" + where + "' must be a nonempty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw ConfigError("missing key 'seed' (required by stochastic commands)");
  return *seed;
}

PayoffSpec parse_payoff(const json& j, const LevelGrid& grid, const std::string& where) {
  const std::string family = text(need(j, "family", where), where + ".family");
  try {
    if (family == "quadratic") {
      only_keys(j, {"family", "alpha", "beta", "gamma"}, where);
      Quadratic q{number_or(j, "alpha", 1.0, where), number_or(j, "beta", 1.0, where),
                  number_or(j, "gamma", 0.0, where)};
      return q;
    }
    if (family == "cara") {
      only_keys(j, {"family", "gamma"}, where);
      return Cara{number(need(j, "gamma", where), where + ".gamma")};
    }
    if (family == "crra") {
      only_keys(j, {"family", "gamma", "floor"}, where);
      return Crra{number(need(j, "gamma", where), where + ".gamma"),
                  number_or(j, "floor", grid.step(), where)};
    }
    if (family == "tabulated") {
      only_keys(j, {"family", "l_max", "good", "bad"}, where);
      auto good = numbers(need(j, "good", where), where + ".good");
      auto bad = numbers(need(j, "bad", where), where + ".bad");
      if (good.size() != bad.size() || good.size() < 2) {
        throw ConfigError("'" + where + "' needs equally long good/bad tables of at least 2 values");
      }
      const double l_max = number_or(j, "l_max", grid.l_max(), where);
      return Tabulated{LevelGrid(l_max, good.size()), std::move(good), std::move(bad)};
    }
  } catch (const DomainError& e) {
    throw ConfigError("'" + where + "': " + e.what());
  }
  throw ConfigError("'" + where + ".family' must be quadratic, cara, crra or tabulated, got '" + family + "'");
}

MechanismSpec parse_mechanism(const json& j, const LevelGrid& grid, const std::string& where) {
  const std::string type = text(need(j, "type", where), where + ".type");
  MechanismSpec out;
  out.label = j.contains("label") ? text(j.at("label"), where + ".label") : type;
  try {
    if (type == "zero") {
      only_keys(j, {"type", "label"}, where);
      out.mechanism = ZeroTax{};
    } else if (type == "robust") {
      only_keys(j, {"type", "label"}, where);
      out.robust = true;
    } else if (type == "fixed_tax_hard_quota") {
      only_keys(j, {"type", "label", "lambda", "quota"}, where);
      out.mechanism = FixedTaxHardQuota{number(need(j, "lambda", where), where + ".lambda"),
                                        number(need(j, "quota", where), where + ".quota")};
    } else if (type == "linear") {
      only_keys(j, {"type", "label", "rate"}, where);
      out.mechanism = LinearTax{number(need(j, "rate", where), where + ".rate")};
    } else if (type == "exponential") {
      only_keys(j, {"type", "label", "rate"}, where);
      out.mechanism = ExponentialTax{number(need(j, "rate", where), where + ".rate")};
    } else if (type == "tabulated") {
      only_keys(j, {"type", "label", "l_max", "values"}, where);
      const auto& vals = need(j, "values", where);
      if (!vals.is_array() || vals.size() < 2) throw ConfigError("'" + where + ".values' needs at least 2 entries");
      std::vector<Transfer> values;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        // null marks a prohibited level
        values.push_back(vals[i].is_null() ? prohibited
                                           : Transfer(number(vals[i], where + ".values[" + std::to_string(i) + "]")));
      }
      const double l_max = number_or(j, "l_max", grid.l_max(), where);
      out.mechanism = TabulatedTax{LevelGrid(l_max, values.size()), std::move(values)};
    } else {
      throw ConfigError("'" + where + ".type' must be zero, robust, fixed_tax_hard_quota, linear, "
                        "exponential or tabulated, got '" + type + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError("'" + where + "': " + e.what());
  }
  return out;
}

RunConfig parse_config(const json& doc) {
  only_keys(doc, {"payoff", "mechanism", "grid", "belief_grid", "prior", "seed", "output", "gap", "tree",
                  "refinements", "tolerance"},
            "config");
  RunConfig c;
  const auto& g = need(doc, "grid", "config");
  only_keys(g, {"l_max", "n"}, "grid");
  c.l_max = number(need(g, "l_max", "grid"), "grid.l_max");
  if (!(c.l_max > 0.0)) throw ConfigError("'grid.l_max' must be positive");
  c.n = count(need(g, "n", "grid"), "grid.n", 2, 1000001);
  const LevelGrid grid = c.grid();

  if (doc.contains("belief_grid")) {
    only_keys(doc["belief_grid"], {"n_mu"}, "belief_grid");
    c.n_mu = count(need(doc["belief_grid"], "n_mu", "belief_grid"), "belief_grid.n_mu", 2, 1000001);
  }
  const auto& prior = need(doc, "prior", "config");
  only_keys(prior, {"mu0"}, "prior");
  c.mu0 = number(need(prior, "mu0", "prior"), "prior.mu0");
  if (!(c.mu0 >= 0.0 && c.mu0 <= 1.0)) throw ConfigError("'prior.mu0' must lie in [0, 1]");

  const auto& pay = need(doc, "payoff", "config");
  only_keys(pay, {"agent", "principal"}, "payoff");
  c.agent = parse_payoff(need(pay, "agent", "payoff"), grid, "payoff.agent");
  c.principal = parse_payoff(need(pay, "principal", "payoff"), grid, "payoff.principal");

  if (doc.contains("mechanism")) c.mechanism = parse_mechanism(doc["mechanism"], grid, "mechanism");
  else c.mechanism.label = "zero";

  if (doc.contains("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("'seed' must be a nonnegative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    only_keys(doc["output"], {"dir"}, "output");
    c.out_dir = text(need(doc["output"], "dir", "output"), "output.dir");
  }
  if (doc.contains("gap")) {
    const auto& gap = doc["gap"];
    only_keys(gap, {"l_max", "mechanisms"}, "gap");
    if (gap.contains("l_max")) {
      c.gap_l_max = numbers(gap["l_max"], "gap.l_max");
      for (double l : c.gap_l_max) {
        if (!(l > 0.0)) throw ConfigError("'gap.l_max' entries must be positive");
      }
    }
    if (gap.contains("mechanisms")) {
      const auto& ms = gap["mechanisms"];
      if (!ms.is_array() || ms.empty()) throw ConfigError("'gap.mechanisms' must be a nonempty array");
      for (std::size_t i = 0; i < ms.size(); ++i) {
        c.gap_mechanisms.push_back(parse_mechanism(ms[i], grid, "gap.mechanisms[" + std::to_string(i) + "]"));
      }
    }
  }
  if (doc.contains("tree")) {
    const auto& t = doc["tree"];
    only_keys(t, {"type", "q", "steps"}, "tree");
    c.tree.type = text(need(t, "type", "tree"), "tree.type");
    if (c.tree.type != "no_learning" && c.tree.type != "full_revelation" && c.tree.type != "binomial") {
      throw ConfigError("'tree.type' must be no_learning, full_revelation or binomial");
    }
    if (t.contains("q")) {
      c.tree.q = number(t["q"], "tree.q");
      if (!(c.tree.q >= 0.0 && c.tree.q <= 1.0)) throw ConfigError("'tree.q' must lie in [0, 1]");
    }
    if (t.contains("steps")) c.tree.steps = count(t["steps"], "tree.steps", 0, 64);
  }
  if (doc.contains("refinements")) c.refinements = count(doc["refinements"], "refinements", 0, 100000);
  if (doc.contains("tolerance")) {
    c.tolerance = number(doc["tolerance"], "tolerance");
    if (!(c.tolerance > 0.0)) throw ConfigError("'tolerance' must be positive");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

std::vector<PayoffSpec> load_ambiguity(const std::filesystem::path& path, const LevelGrid& grid) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open ambiguity set " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  if (doc.is_object()) {
    only_keys(doc, {"members"}, "ambiguity");
    doc = need(doc, "members", "ambiguity");
  }
  if (!doc.is_array() || doc.empty()) throw ConfigError("ambiguity set must be a nonempty array of payoffs");
  std::vector<PayoffSpec> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.push_back(parse_payoff(doc[i], grid, "ambiguity[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace robreg
