#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dphase::cli {

/// Exit statuses shared by every subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  ///< overrides [run] seed
  bool force = false;
};

/// Runs one subcommand, e.g. {"check", "zsigma"} or {"converge"}. Reports go to `out_dir`, a short summary to
/// `out`, and usage or configuration errors to `err`. Returns kExitPass, kExitFail or kExitUsage.
int run_command(const std::vector<std::string>& command, const Options& opts, std::ostream& out, std::ostream& err);

/// The subcommand names accepted by run_command, with their allowed second words (empty when none).
struct CommandInfo {
  std::string name;
  std::vector<std::string> targets;
  std::string help;
};
const std::vector<CommandInfo>& command_table();

}  // namespace dphase::cli
