// Scenario-driven front end: closed-loop episodes, solve-only runs, and the
// comparative template-model study.

#include <CLI11.hpp>

#include "wbmpc/cli/runner.hpp"
#include "wbmpc/cli/study.hpp"

int main(int argc, char** argv) {
  CLI::App app{"whole-body locomotion/manipulation MPC runner"};
  app.require_subcommand(1);

  std::string scenarioPath;
  wbmpc::RunFlags flags;
  std::uint64_t seed = 0;
  double duration = 0.0;
  std::string disturbance;
  bool threaded = false;

  const auto addCommon = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenarioPath, "scenario JSON file")->required();
    cmd->add_option("--out", flags.outputDir, "output directory for artifacts");
    cmd->add_option("--seed", seed, "override the scenario seed");
    cmd->add_option("--duration", duration, "override the episode duration [s]");
    cmd->add_flag("--lockstep,!--threaded", flags.lockstep,
                  "run the planner synchronously with the plant (default)");
    cmd->add_flag("--verify-derivatives", flags.verifyDerivatives,
                  "check every LQ node against the finite-difference oracle");
    cmd->add_option("--disturbance", disturbance, "on|off: toggle the scenario disturbance");
  };

  auto* run = app.add_subcommand("run", "run a closed-loop episode");
  addCommon(run);
  run->add_flag("--solve-only", flags.solveOnly, "single solve over the horizon, no episode");

  auto* study = app.add_subcommand("study", "run the comparative template-model study");
  addCommon(study);

  CLI11_PARSE(app, argc, argv);
  (void)threaded;

  if (app.count_all() > 0) {
    if (run->parsed() || study->parsed()) {
      auto* cmd = run->parsed() ? run : study;
      if (cmd->count("--seed") > 0) {
        flags.seed = seed;
      }
      if (cmd->count("--duration") > 0) {
        flags.duration = duration;
      }
      if (!disturbance.empty()) {
        if (disturbance != "on" && disturbance != "off") {
          std::cerr << "--disturbance takes on|off\n";
          return wbmpc::kExitValidation;
        }
        flags.disturbance = disturbance == "on";
      }
    }
  }

  if (run->parsed()) {
    return wbmpc::runScenarioFile(scenarioPath, flags);
  }
  return wbmpc::runStudyFile(scenarioPath, flags);
}
