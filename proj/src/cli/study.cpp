#include "wbmpc/cli/study.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace wbmpc {

namespace {

struct Variant {
  std::string name;
  bool srbd;
  bool object;
};

}  // namespace

StudyResult comparativeStudy(const Scenario& scenario, const RunFlags& flags) {
  if (scenario.task != TaskKind::ComparativeLift) {
    throw ScenarioValidationError("comparative study requires task == comparative_lift");
  }
  std::vector<scalar_t> grid = scenario.study.liftTimeGrid;
  std::sort(grid.begin(), grid.end());

  const std::vector<Variant> variants = {
      {"centroidal_with_object", false, true},
      {"centroidal_without_object", false, false},
      {"srbd_with_object", true, true},
      {"srbd_without_object", true, false},
  };

  StudyResult result;
  for (const auto& variant : variants) {
    StudyRow row;
    row.variant = variant.name;
    for (const scalar_t liftTime : grid) {
      AssemblyOptions options;
      options.srbd = variant.srbd;
      options.plannerSeesObject = variant.object;
      options.liftTimeOverride = liftTime;
      options.seedOverride = flags.seed;
      options.lockstepOverride = flags.lockstep;

      ScenarioAssembly a = buildScenario(scenario, options);
      EpisodeLog log;
      try {
        log = runEpisode(*a.plant, *a.runtime, a.initialState, a.episode);
      } catch (const std::exception&) {
        continue;
      }
      const MetricsSummary metrics = computeMetrics(log);
      bool fallbackSeen = false;
      for (const auto& rec : log.records) {
        fallbackSeen = fallbackSeen || rec.fallback;
      }
      const bool success = metrics.success && !fallbackSeen;
      if (flags.verbosity > 1) {
        std::cout << variant.name << " lift " << liftTime << " s -> "
                  << (success ? "ok" : (log.failed ? "diverged" : "not settled")) << ", settling "
                  << metrics.settlingTime << " s\n";
      }
      if (success) {
        row.feasible = true;
        row.minLiftTime = liftTime;
        row.settlingTime = metrics.settlingTime;
        row.meanSolveMs = metrics.meanSolveMs;
        break;  // grid is sorted ascending; the first success is the minimum
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

void writeStudyCsv(const StudyResult& result, const std::string& path) {
  std::ofstream out(path);
  out << "variant,feasible,min_lift_time_s,settling_time_s,mean_solve_ms\n";
  for (const auto& row : result.rows) {
    out << row.variant << ',' << (row.feasible ? 1 : 0) << ',' << row.minLiftTime << ','
        << row.settlingTime << ',' << row.meanSolveMs << '\n';
  }
}

std::string studyTable(const StudyResult& result) {
  std::ostringstream out;
  out << "variant                        min lift time [s]   settling [s]   mean solve [ms]\n";
  for (const auto& row : result.rows) {
    out << row.variant;
    for (std::size_t i = row.variant.size(); i < 31; ++i) {
      out << ' ';
    }
    if (row.feasible) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%-20.2f%-15.2f%.1f", row.minLiftTime, row.settlingTime,
                    row.meanSolveMs);
      out << buf;
    } else {
      out << "no feasible time in grid";
    }
    out << '\n';
  }
  return out.str();
}

int runStudyFile(const std::string& path, const RunFlags& flags) {
  try {
    const Scenario scenario = loadScenario(path);
    const StudyResult result = comparativeStudy(scenario, flags);
    std::filesystem::create_directories(flags.outputDir);
    writeStudyCsv(result, flags.outputDir + "/study.csv");
    if (flags.verbosity > 0) {
      std::cout << studyTable(result);
    }
    for (const auto& row : result.rows) {
      if (!row.feasible) {
        return kExitSolverFailure;
      }
    }
    return kExitSuccess;
  } catch (const ScenarioValidationError& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitSolverFailure;
  }
}

}  // namespace wbmpc
