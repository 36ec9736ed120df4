#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "wbmpc/cli/runner.hpp"
#include "wbmpc/cli/study.hpp"

using namespace wbmpc;

#ifndef WBMPC_SCENARIO_DIR
#define WBMPC_SCENARIO_DIR "scenarios"
#endif

namespace {

std::vector<std::string> shippedScenarios() {
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(WBMPC_SCENARIO_DIR)) {
    if (entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

TEST_CASE("scenario round trip: load -> serialize -> load is the identity") {
  for (const auto& path : shippedScenarios()) {
    CAPTURE(path);
    const Scenario a = loadScenario(path);
    const nlohmann::json ja = scenarioToJson(a);
    const Scenario b = parseScenario(ja, "");
    const nlohmann::json jb = scenarioToJson(b);
    CHECK(ja == jb);
  }
}

TEST_CASE("every shipped scenario validates and assembles") {
  const auto files = shippedScenarios();
  REQUIRE(files.size() >= 10);
  for (const auto& path : files) {
    CAPTURE(path);
    const Scenario scenario = loadScenario(path);
    CHECK_NOTHROW(buildScenario(scenario, {}));
  }
}

TEST_CASE("scenario validation: field-level errors") {
  const char* missingModel = R"({"name": "x", "task": "base_track"})";
  CHECK_THROWS_WITH_AS(parseScenario(nlohmann::json::parse(missingModel), ""),
                       doctest::Contains("required"), ScenarioValidationError);

  const char* unknownField = R"({"name": "x", "task": "base_track", "model": "m.json", "colour": 3})";
  CHECK_THROWS_WITH_AS(parseScenario(nlohmann::json::parse(unknownField), ""),
                       doctest::Contains("unknown field 'colour'"), ScenarioValidationError);

  const char* doorWithoutObject = R"({"name": "x", "task": "door_pull", "model": "m.json"})";
  CHECK_THROWS_WITH_AS(parseScenario(nlohmann::json::parse(doorWithoutObject), ""),
                       doctest::Contains("requires an object"), ScenarioValidationError);

  const char* badGait =
      R"({"name": "x", "task": "base_track", "model": "m.json", "gait": {"name": "gallop"}})";
  CHECK_THROWS_AS(parseScenario(nlohmann::json::parse(badGait), ""), std::exception);

  const char* badRelease =
      R"({"name": "x", "task": "base_track", "model": "m.json", "duration": 1.0,
          "manipulation": {"kind": "release_at", "t_s": 5.0}})";
  CHECK_THROWS_WITH_AS(parseScenario(nlohmann::json::parse(badRelease), ""),
                       doctest::Contains("t_s"), ScenarioValidationError);
}

TEST_CASE("malformed scenario file exits with the validation code") {
  const std::string path = "/tmp/wbmpc_bad_scenario.json";
  {
    std::ofstream out(path);
    out << R"({"name": "bad", "task": "door_pull", "model": ")" << WBMPC_SCENARIO_DIR
        << R"(/../models/quadruped_lite.json"})";
  }
  RunFlags flags;
  flags.outputDir = "/tmp/wbmpc_bad_out";
  flags.verbosity = 0;
  CHECK(runScenarioFile(path, flags) == kExitValidation);
  CHECK(runScenarioFile("/nonexistent/scenario.json", flags) == kExitValidation);
  std::remove(path.c_str());
}

TEST_CASE("study requires the comparative task") {
  const Scenario stance = loadScenario(std::string(WBMPC_SCENARIO_DIR) + "/stance_hold.json");
  RunFlags flags;
  CHECK_THROWS_AS(comparativeStudy(stance, flags), ScenarioValidationError);
}

TEST_CASE("solve-only run writes a report and returns success on stance") {
  const Scenario scenario = loadScenario(std::string(WBMPC_SCENARIO_DIR) + "/stance_hold.json");
  RunFlags flags;
  flags.outputDir = "/tmp/wbmpc_solveonly";
  flags.solveOnly = true;
  flags.verbosity = 0;
  const auto outcome = runScenario(scenario, flags);
  CHECK(outcome.exitCode == kExitSuccess);
  CHECK(std::filesystem::exists("/tmp/wbmpc_solveonly/solve_report.txt"));
  std::filesystem::remove_all("/tmp/wbmpc_solveonly");
}
