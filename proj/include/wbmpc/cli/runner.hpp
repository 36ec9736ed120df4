#pragma once

#include "wbmpc/cli/scenario.hpp"

namespace wbmpc {

struct RunFlags {
  std::string outputDir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<scalar_t> duration;
  std::optional<bool> disturbance;
  bool lockstep = true;
  bool solveOnly = false;
  bool verifyDerivatives = false;
  int verbosity = 1;  // 0 quiet, 1 info, 2 debug
};

/// Exit codes of the scenario runner.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitPlantDivergence = 4;

struct RunOutcome {
  int exitCode = kExitSuccess;
  EpisodeLog log;
  MetricsSummary metrics;
  SolverSolution solution;  // solve-only mode
};

/// Runs a loaded scenario (closed loop or solve-only) and writes
/// episode.csv, metrics.json, and solve_report.txt into the output dir.
RunOutcome runScenario(const Scenario& scenario, const RunFlags& flags);

/// Loads, validates, and runs; maps validation errors to exit code 2.
int runScenarioFile(const std::string& path, const RunFlags& flags);

}  // namespace wbmpc
