#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace robreg {

/// Global flags shared by the subcommands.
struct CliOptions {
  std::string config;
  std::string out;  // output directory; files are skipped when empty
  std::optional<std::size_t> grid_n;
  std::optional<std::uint64_t> seed;
  std::string format = "json";  // json | csv (what goes to stdout)
  std::string ambiguity;        // robust: JSON list of agent payoffs
  bool dual = false;            // worstcase: add the dual certificate
  bool quick = false;           // accept: fast subset
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;

int cmd_check(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_robust(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_worstcase(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_gap(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_adaptive(const CliOptions& o, std::ostream& out, std::ostream& err);
int cmd_accept(const CliOptions& o, std::ostream& out, std::ostream& err);

/// Dispatches by name and maps exceptions to exit codes: ConfigError to 2,
/// any other failure to 1.
int run_command(const std::string& name, const CliOptions& o, std::ostream& out, std::ostream& err);

}  // namespace robreg
