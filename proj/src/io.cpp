#include "robreg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "robreg/errors.hpp"

namespace robreg {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string cell(double x) { return format_double(x); }
std::string cell(std::size_t x) { return std::to_string(x); }
std::string cell(bool x) { return x ? "1" : "0"; }

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw DomainError("CSV row width differs from the header");
  rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot rename " + tmp.string() + ": " + ec.message());
}

CsvTable surplus_csv(const RobustMechanismResult& r) {
  CsvTable t{{"level", "surplus"}, {}};
  for (std::size_t j = 0; j < r.surplus_curve.size(); ++j) t.add({cell(r.grid[j]), cell(r.surplus_curve[j])});
  return t;
}

CsvTable joint_csv(const std::vector<StopAtom>& atoms) {
  CsvTable t{{"stop_level", "stop_belief", "mass"}, {}};
  for (const auto& a : atoms) t.add({cell(a.level), cell(a.belief), cell(a.mass)});
  return t;
}

CsvTable empirical_csv(const EmpiricalJoint& e) { return joint_csv(e.atoms); }

CsvTable worstcase_csv(const WorstCase& w, const ObedienceReport& obedience,
                       const std::vector<double>& mu_hat_U, const std::vector<double>& mu_hat_V) {
  const auto& bn = w.process;
  CsvTable t{{"level", "G", "cont_belief", "binding", "mu_hat_U", "mu_hat_V"}, {}};
  std::vector<bool> binding(bn.g.size(), false);
  for (std::size_t j : obedience.binding) binding[j] = true;
  for (std::size_t j = 0; j < bn.g.size(); ++j) {
    t.add({cell(bn.grid[j]), cell(bn.G[j]), cell(bn.cont_belief[j]), cell(static_cast<bool>(binding[j])),
           cell(mu_hat_U.at(j)), cell(mu_hat_V.at(j))});
  }
  return t;
}

CsvTable policy_csv(const AdaptivePolicy& p) {
  CsvTable t{{"node_id", "level", "belief", "stop"}, {}};
  const auto& proc = p.tree.process();
  std::size_t id = 0;
  for (std::size_t j = 0; j < proc.depth(); ++j) {
    for (std::size_t i = 0; i < proc.layer(j).size(); ++i) {
      t.add({cell(id++), cell(proc.grid()[j]), cell(proc.layer(j)[i].belief),
             cell(static_cast<bool>(p.stop_set[j][i]))});
    }
  }
  return t;
}

nlohmann::json mechanism_json(const Mechanism& m) {
  nlohmann::json j{{"type", m.family_name()}};
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FixedTaxHardQuota>) {
          j["lambda"] = f.lambda;
          j["quota"] = f.quota;
        } else if constexpr (std::is_same_v<T, LinearTax> || std::is_same_v<T, ExponentialTax>) {
          j["rate"] = f.rate;
        } else if constexpr (std::is_same_v<T, TabulatedTax>) {
          auto vals = nlohmann::json::array();
          for (const auto& v : f.values) vals.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
          j["l_max"] = f.grid.l_max();
          j["values"] = vals;
        }
      },
      m.family());
  return j;
}

namespace {
nlohmann::json witness(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  return {{"mu", w->mu}, {"level", w->level}};
}
nlohmann::json opt(const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); }
}  // namespace

nlohmann::json to_json(const AssumptionReport& r) {
  return {{"single_peaked", r.single_peaked},
          {"monotone", r.monotone},
          {"ordered", r.ordered},
          {"single_peaked_witness", witness(r.single_peaked_witness)},
          {"monotone_witness", witness(r.monotone_witness)},
          {"ordered_witness", witness(r.ordered_witness)}};
}

nlohmann::json to_json(const RatioReport& r) {
  return {{"nondecreasing", r.nondecreasing}, {"witness_level", opt(r.witness_level)}};
}

nlohmann::json to_json(const PremiseReport& r) {
  return {{"holds", r.holds}, {"witness", witness(r.witness)}};
}

nlohmann::json to_json(const RobustMechanismResult& r) {
  return {{"L_star", r.L_star},
          {"lambda_star", r.lambda_star},
          {"guarantee", r.guarantee},
          {"mu0", r.mu0},
          {"mechanism", mechanism_json(r.mechanism)}};
}

nlohmann::json to_json(const GuaranteeReport& r) {
  return {{"min_value", r.min_value},       {"gap", r.gap},
          {"lp_value", r.lp_value},         {"tree_value", opt(r.tree_value)},
          {"participation_gap", r.participation_gap},
          {"random_min", r.random_min},     {"random_trees", r.random_trees},
          {"holds", r.holds}};
}

nlohmann::json to_json(const GapReport& r) {
  return {{"gap", r.gap}, {"guarantee", r.guarantee}, {"worst", r.worst}, {"method", r.method},
          {"premise", r.premise}};
}

nlohmann::json to_json(const WorstCase& w, const ObedienceReport& obedience) {
  return {{"value", w.value},
          {"objective", w.lp_value},
          {"iterations", w.iterations},
          {"premise_holds", w.premise_holds},
          {"escaped", w.escaped},
          {"binding", obedience.binding},
          {"max_violation", obedience.max_violation},
          {"support", w.process.support}};
}

nlohmann::json to_json(const DualCertificate& c) {
  return {{"dual_value", c.dual_value},
          {"primal_value", c.primal_value},
          {"duality_gap", c.gap},
          {"lbar", c.lbar},
          {"z", c.z},
          {"three_branch_value", c.three_branch_value},
          {"max_cs_violation", c.max_cs_violation},
          {"complementary_slackness", c.complementary_slackness}};
}

nlohmann::json to_json(const AdaptivePolicy& p) {
  auto joint = nlohmann::json::array();
  for (const auto& a : p.joint) joint.push_back({{"level", a.level}, {"belief", a.belief}, {"mass", a.mass}});
  return {{"value", p.value}, {"lambda", p.lambda_adaptive}, {"mu0", p.mu0}, {"stops", joint}};
}

}  // namespace robreg
