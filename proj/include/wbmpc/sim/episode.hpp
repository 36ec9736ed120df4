#pragma once

#include <string>

#include "wbmpc/mpc/mpc_runtime.hpp"
#include "wbmpc/sim/plant.hpp"

namespace wbmpc {

/// One plant-rate sample of a closed-loop episode.
struct EpisodeRecord {
  scalar_t time = 0.0;
  vector_t plantState;
  vector_t appliedInput;
  vector_t plannerReferenceState;  // planner nominal at this time
  scalar_t trackedValue = 0.0;     // scenario-selected tracked quantity
  scalar_t trackedReference = 0.0;
  scalar_t auditedEqualityResidual = 0.0;    // max over the newest plan
  scalar_t auditedInequalityViolation = 0.0;
  scalar_t plannerCost = 0.0;
  int plannerIterations = 0;
  bool fallback = false;
  bool disturbanceActive = false;
  scalar_t plantConeViolation = 0.0;
};

struct EpisodeLog {
  std::vector<EpisodeRecord> records;
  std::vector<scalar_t> solveTimesMs;  // per replan; kept out of the CSV
  bool failed = false;
  std::string failure;
  scalar_t duration = 0.0;
  scalar_t plantDt = 0.0;
};

/// Selects the scalar signal the episode metrics track.
struct TrackedSignal {
  enum class Kind { StateChannel, EePositionAxis };
  Kind kind = Kind::StateChannel;
  int index = 7;  // state channel (default: base y) or axis for EePositionAxis
  std::function<scalar_t(scalar_t)> reference = [](scalar_t) { return 0.0; };
};

struct EpisodeConfig {
  scalar_t duration = 5.0;
  scalar_t mpcPeriod = 0.015;  // replan cadence in simulated time
  bool lockstep = true;
  std::uint64_t seed = 0;
  TrackedSignal tracked;
};

/// Runs the closed loop: at each plant step the newest affine MPC policy is
/// evaluated at the true plant state; replans happen every mpcPeriod. In
/// lockstep mode the planner runs synchronously (deterministic); otherwise it
/// runs on the MpcActor thread and the plant consumes the newest snapshot.
EpisodeLog runEpisode(Plant& plant, MpcRuntime& runtime, const vector_t& x0,
                      const EpisodeConfig& config);

/// Audits a planner solution against the constraint bank (nonlinear
/// residuals at the solution nodes).
std::pair<scalar_t, scalar_t> auditSolution(const CentroidalOcp& problem, const SolverSolution& solution);

/// Writes the episode as CSV, one row per plant step. The column schema is
/// versioned and documented in the README.
void writeEpisodeCsv(const EpisodeLog& log, const std::string& path);

}  // namespace wbmpc
