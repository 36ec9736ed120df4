#include "wbmpc/cli/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace wbmpc {

namespace {

int verbosityFromEnv(int fallback) {
  const char* env = std::getenv("WBMPC_LOG");
  if (env == nullptr) {
    return fallback;
  }
  const std::string v(env);
  if (v == "quiet") return 0;
  if (v == "info") return 1;
  if (v == "debug") return 2;
  return fallback;
}

void writeSolveReport(const std::string& path, const Scenario& scenario, const ConvergenceReport& report,
                      const MetricsSummary* metrics, const EpisodeLog* log) {
  std::ofstream out(path);
  out << "scenario: " << scenario.name << "\n"
      << "task: " << toString(scenario.task) << "\n"
      << "converged: " << (report.converged ? "yes" : "no") << "\n"
      << "outer_iterations: " << report.outerIterations << "\n"
      << "inner_iterations: " << report.innerIterations << "\n"
      << "cost: " << report.cost << "\n"
      << "max_equality_residual: " << report.maxEqualityResidual << "\n"
      << "max_inequality_violation: " << report.maxInequalityViolation << "\n"
      << "penalty: " << report.penalty << "\n"
      << "solve_time_ms: " << report.solveTimeMs << "\n";
  if (report.maxDerivativeError > 0.0) {
    out << "max_derivative_error: " << report.maxDerivativeError << "\n";
  }
  if (!report.failure.empty()) {
    out << "failure: " << report.failure << "\n";
  }
  if (metrics != nullptr && log != nullptr) {
    out << "episode_duration: " << log->duration << "\n"
        << "episode_failed: " << (log->failed ? "yes" : "no") << "\n"
        << "settling_time_s: " << metrics->settlingTime << "\n"
        << "steady_state_error: " << metrics->steadyStateError << "\n"
        << "roll_l2_norm: " << metrics->rollL2 << "\n"
        << "audited_max_equality_residual: " << metrics->maxEqualityResidual << "\n"
        << "audited_max_inequality_violation: " << metrics->maxInequalityViolation << "\n"
        << "mean_solve_ms: " << metrics->meanSolveMs << "\n";
  }
}

}  // namespace

RunOutcome runScenario(const Scenario& scenario, const RunFlags& flags) {
  RunOutcome outcome;
  const int verbosity = verbosityFromEnv(flags.verbosity);

  AssemblyOptions options;
  options.seedOverride = flags.seed;
  options.durationOverride = flags.duration;
  options.disturbanceOverride = flags.disturbance;
  options.lockstepOverride = flags.lockstep;
  ScenarioAssembly a = buildScenario(scenario, options);
  if (flags.verifyDerivatives) {
    a.solverSettings.verifyDerivatives = true;
  }

  std::filesystem::create_directories(flags.outputDir);
  const std::string csvPath = flags.outputDir + "/episode.csv";
  const std::string metricsPath = flags.outputDir + "/metrics.json";
  const std::string reportPath = flags.outputDir + "/solve_report.txt";

  if (flags.solveOnly) {
    // One full solve over the MPC horizon, through the same runtime path.
    const auto result = a.runtime->step(a.initialState, 0.0);
    outcome.solution = result.solution;
    writeSolveReport(reportPath, scenario, outcome.solution.report, nullptr, nullptr);
    outcome.exitCode = outcome.solution.report.converged ? kExitSuccess : kExitSolverFailure;
    if (verbosity > 0) {
      std::cout << scenario.name << ": solve "
                << (outcome.solution.report.converged ? "converged" : "did not converge") << ", cost "
                << outcome.solution.report.cost << "\n";
    }
    return outcome;
  }

  outcome.log = runEpisode(*a.plant, *a.runtime, a.initialState, a.episode);
  outcome.metrics = computeMetrics(outcome.log);

  writeEpisodeCsv(outcome.log, csvPath);
  writeMetricsJson(outcome.metrics, outcome.log, metricsPath);

  ConvergenceReport lastReport;
  if (!outcome.log.records.empty()) {
    lastReport.cost = outcome.log.records.back().plannerCost;
  }
  writeSolveReport(reportPath, scenario, lastReport, &outcome.metrics, &outcome.log);

  if (outcome.log.failed) {
    outcome.exitCode = kExitPlantDivergence;
  } else if (!outcome.metrics.success) {
    outcome.exitCode = kExitSolverFailure;
  } else {
    outcome.exitCode = kExitSuccess;
  }
  if (verbosity > 0) {
    std::cout << scenario.name << ": " << (outcome.exitCode == 0 ? "success" : "failed") << ", settling "
              << outcome.metrics.settlingTime << " s, max violation "
              << outcome.metrics.maxInequalityViolation << ", mean solve "
              << outcome.metrics.meanSolveMs << " ms\n";
  }
  return outcome;
}

int runScenarioFile(const std::string& path, const RunFlags& flags) {
  try {
    const Scenario scenario = loadScenario(path);
    return runScenario(scenario, flags).exitCode;
  } catch (const ScenarioValidationError& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitSolverFailure;
  }
}

}  // namespace wbmpc
