#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "robreg/adaptive.hpp"
#include "robreg/checks.hpp"
#include "robreg/mechanism.hpp"
#include "robreg/robust.hpp"
#include "robreg/stopping.hpp"
#include "robreg/worstcase.hpp"

namespace robreg {

/// Round-trip representation: 17 significant digits, '.' decimal, no locale.
std::string format_double(double x);

/// CSV table with a header row. Cells are preformatted strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  void write(std::ostream& os) const;
  std::string str() const;
};

std::string cell(double x);
std::string cell(std::size_t x);
std::string cell(bool x);

/// Writes through a temporary file and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// CSV layouts.
CsvTable surplus_csv(const RobustMechanismResult& r);                 // level, surplus
CsvTable joint_csv(const std::vector<StopAtom>& atoms);              // stop_level, stop_belief, mass
CsvTable empirical_csv(const EmpiricalJoint& e);                      // same columns
/// level, G, cont_belief, binding, mu_hat_U, mu_hat_V.
CsvTable worstcase_csv(const WorstCase& w, const ObedienceReport& obedience,
                       const std::vector<double>& mu_hat_U, const std::vector<double>& mu_hat_V);
CsvTable policy_csv(const AdaptivePolicy& p);  // node_id, level, belief, stop

// JSON layouts.
nlohmann::json mechanism_json(const Mechanism& m);  // type plus parameters
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const RatioReport& r);
nlohmann::json to_json(const PremiseReport& r);
nlohmann::json to_json(const RobustMechanismResult& r);  // no curve
nlohmann::json to_json(const GuaranteeReport& r);
nlohmann::json to_json(const GapReport& r);
nlohmann::json to_json(const WorstCase& w, const ObedienceReport& obedience);
nlohmann::json to_json(const DualCertificate& c);
nlohmann::json to_json(const AdaptivePolicy& p);  // no per-node data

}  // namespace robreg
