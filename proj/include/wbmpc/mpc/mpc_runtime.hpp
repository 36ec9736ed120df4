#pragma once

#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>

#include "wbmpc/modes/gait.hpp"
#include "wbmpc/mpc/conversions.hpp"
#include "wbmpc/ocp/centroidal_ocp.hpp"
#include "wbmpc/solver/slq.hpp"

namespace wbmpc {

struct MpcConfig {
  scalar_t horizon = 1.0;       // s
  scalar_t dt = 0.015;          // transcription step
  int rtInnerIterations = 1;    // real-time iteration cap per replan
  int rtOuterIterations = 1;    // multiplier updates per replan
  bool fullFirstSolve = true;   // run the cold-start solve to convergence
  scalar_t referenceSampleDt = 0.015;
  bool exactFootAcceleration = false;
};

/// Receding-horizon wrapper: re-anchors the mode schedule from the gait and
/// manipulation templates at every replan, warm-starts from the previous
/// solution shifted in time, and spends at most the configured iteration
/// budget. Falls back to the previous policy when a solve fails.
class MpcRuntime {
 public:
  struct StepResult {
    SolverSolution solution;
    TrackingReferences references;
    bool usedFallback = false;
    scalar_t clockTime = 0.0;
  };

  MpcRuntime(std::shared_ptr<const CentroidalOcp> problem, GaitSpec gait, ManipulationSpec manipulation,
             MpcConfig config, AlSettings solverSettings = AlSettings());

  /// Plans over [clockTime, clockTime + horizon] from the measured state.
  StepResult step(const vector_t& measuredState, scalar_t clockTime);

  const MpcConfig& config() const { return config_; }
  const CentroidalOcp& problem() const { return *problem_; }
  ContactFlags modeAt(scalar_t t) const;
  void reset();

 private:
  std::shared_ptr<const CentroidalOcp> problem_;
  GaitSpec gait_;
  ManipulationSpec manipulation_;
  ContactLayout layout_;
  MpcConfig config_;
  AlSettings solverSettings_;
  std::optional<SolverSolution> previous_;
  bool coldStart_ = true;
};

/// Latest-wins mailbox actor around MpcRuntime: the planning thread consumes
/// the newest measured state and publishes immutable snapshots; readers never
/// block the planner.
class MpcActor {
 public:
  MpcActor(std::shared_ptr<MpcRuntime> runtime);
  ~MpcActor();

  MpcActor(const MpcActor&) = delete;
  MpcActor& operator=(const MpcActor&) = delete;

  /// Posts a new measured state (overwrites any unconsumed one).
  void postState(const vector_t& state, scalar_t clockTime);
  /// Newest published plan, if any.
  std::shared_ptr<const MpcRuntime::StepResult> snapshot() const;
  /// Blocks until at least one plan has been published.
  std::shared_ptr<const MpcRuntime::StepResult> waitForFirstPlan();
  void stop();

 private:
  void loop();

  std::shared_ptr<MpcRuntime> runtime_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::optional<std::pair<vector_t, scalar_t>> mailbox_;
  std::shared_ptr<const MpcRuntime::StepResult> snapshot_;
  bool stop_ = false;
  std::thread thread_;
};

}  // namespace wbmpc
