#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "epdecay/experiments.hpp"

namespace epdecay {

/// Exit statuses of the command-line tool.
enum ExitStatus : int {
  kExitPass = 0,
  kExitCheckFailure = 1,
  kExitUsage = 2,
  kExitRuntime = 3,
};

/// Fully resolved run configuration. Unset values take per-command defaults
/// during resolution, so a resolved config is complete and self-describing.
struct RunConfig {
  std::string command;
  std::filesystem::path output = "out";
  std::uint64_t seed = 1;

  int dim = 3;
  int points = 16;
  double length = 32.0;

  double gamma = 5.0 / 3.0;
  double amplitude = 1e-2;
  double mass = 1.0;
  std::string initial = "gaussian-mass";
  std::string mode = "nonlinear";
  double dt = 0.05;
  double final_time = 1.0;
  double snapshot_interval = 0.5;

  std::optional<double> s;
  std::optional<double> p;
  std::vector<double> ells;
  std::optional<double> fit_t0;
  std::optional<double> fit_t1;
  double tolerance = 0.05;
  int samples = 100;
  bool besov = false;
  bool linear_check = true;
  /// simulate: also write the binary trajectory container.
  bool save_trajectory = false;

  /// report: result directories or report.json files to aggregate.
  std::vector<std::filesystem::path> inputs;

  Regime regime() const;
  SolverConfig solver_config() const;
  nlohmann::json to_json() const;
};

/// Parses argv (subcommand, flags, optional --config file; flags override
/// file values) and fills per-command defaults. Returns nullopt after
/// printing help. Throws UsageError naming the offending key.
std::optional<RunConfig> parse_run_config(const std::vector<std::string>& args, std::ostream& out);

/// Runs the configured command, writing manifest.json, report.json and the
/// command's series into config.output. Returns the exit status.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_run_config + execute with error-to-status mapping.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epdecay
