#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "wbmpc/mpc/mpc_runtime.hpp"
#include "wbmpc/sim/episode.hpp"
#include "wbmpc/sim/metrics.hpp"

namespace wbmpc {

struct ScenarioValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TaskKind {
  BaseTrack,
  EeTrack,
  GaitDemo,
  Lift,
  Throw,
  Push,
  Drag,
  DoorPush,
  DoorPull,
  ComparativeLift,
};

TaskKind taskKindFromString(const std::string& s);
std::string toString(TaskKind kind);

/// Declarative description of one experiment; mirrors the JSON scenario file
/// one-to-one so that load -> serialize -> load is the identity.
struct Scenario {
  std::string name;
  TaskKind task = TaskKind::BaseTrack;
  std::string modelPath;  // resolved relative to the scenario file
  scalar_t duration = 5.0;
  std::uint64_t seed = 1;

  struct Gait {
    std::string name = "stance";
    scalar_t cycle = 0.8;
    scalar_t flightRatio = 0.2;
    scalar_t apexHeight = 0.06;
  } gait;

  struct Manipulation {
    std::string kind = "none";  // none | grasped | release_at
    scalar_t switchTime = 0.6;
  } manipulation;

  struct Initial {
    vector_t basePose = vector_t::Zero(6);
    vector_t jointPositions;  // empty: zeros
    bool settleToGround = true;
    bool snapHandToHandle = false;
  } initial;

  struct Object {
    bool present = false;
    std::string type = "door";  // door | point_mass
    scalar_t inertia = 10.0;
    scalar_t damping = 5.0;
    scalar_t spring = 0.0;
    scalar_t recoil = 5.0;
    vector3_t hingePosition = vector3_t::Zero();
    vector3_t hingeAxis = vector3_t::UnitZ();
    vector3_t handleOffset = vector3_t(0.5, 0.0, 0.0);
    scalar_t mass = 5.0;
    vector3_t direction = vector3_t::UnitZ();
    vector3_t startPosition = vector3_t::Zero();
    bool gravityLoaded = true;
    vector_t initialState = vector_t::Zero(2);  // (q_o, v_o)
  } object;

  struct Cost {
    bool alpha1 = false;
    bool alpha2 = true;
    bool alpha3 = false;
    scalar_t momentumLinear = 0.5;
    scalar_t momentumAngular = 1.0;
    scalar_t basePosition = 500.0;
    scalar_t baseOrientation = 300.0;
    scalar_t legJoints = 20.0;
    scalar_t armJoints = 20.0;
    scalar_t legJointVelocities = 0.5;
    scalar_t armJointVelocities = 0.5;
    scalar_t objectPosition = 0.0;
    scalar_t objectVelocity = 0.0;
    scalar_t eePosition = 0.0;
    scalar_t eeOrientation = 0.0;
    scalar_t forces = 1e-3;
    scalar_t armForces = -1.0;  // < 0: same as forces
    scalar_t terminalScale = 2.0;
  } cost;

  struct References {
    // Base pose offset reached by ramping over [rampStart, rampEnd].
    vector_t baseOffset = vector_t::Zero(6);
    scalar_t rampStart = 0.0;
    scalar_t rampEnd = 1.0;
    std::optional<scalar_t> objectTarget;   // generalized position
    std::optional<vector3_t> eeOffset;      // relative to the initial hand position
    std::optional<vector3_t> armForce;
  } references;

  struct LimitsBlock {
    scalar_t frictionCoefficient = 0.7;
    scalar_t coneEpsilon = 0.5;
  } limits;

  struct Mpc {
    scalar_t horizon = 1.0;
    scalar_t dt = 0.015;
    int rtInner = 1;
    int rtOuter = 1;
    bool fullFirstSolve = true;
    scalar_t referenceDt = 0.015;
  } mpc;

  struct Solver {
    scalar_t initialPenalty = 10.0;
    scalar_t penaltyGrowth = 5.0;
    scalar_t maxPenalty = 1e4;
    int maxOuter = 8;
    scalar_t violationTolerance = 1e-3;
    int maxInner = 50;
    scalar_t innerTolerance = 1e-4;
    scalar_t equalityPenalty = 100.0;
  } solver;

  struct PlantBlock {
    scalar_t dt = 0.0025;
    scalar_t mpcPeriod = 0.015;
    std::string payloadLink;
    scalar_t payloadMass = 0.0;
    vector3_t payloadOffset = vector3_t::Zero();
    scalar_t frictionOverride = -1.0;
    scalar_t noiseSigma = 0.0;
    bool disturbanceEnabled = false;
    scalar_t disturbanceStart = 0.0;
    scalar_t disturbanceEnd = 0.0;
    vector6_t disturbanceBaseWrench = vector6_t::Zero();
    scalar_t disturbanceObjectForce = 0.0;
  } plant;

  struct Study {
    std::vector<scalar_t> liftTimeGrid{0.2, 0.5, 1.0, 1.5, 2.0};
    scalar_t displacement = 1.25;
    scalar_t settleWindow = 2.5;  // time allowed after the ramp
  } study;
};

Scenario parseScenario(const nlohmann::json& j, const std::string& baseDir);
Scenario loadScenario(const std::string& path);
nlohmann::json scenarioToJson(const Scenario& s);

/// Everything needed to run the scenario closed loop.
struct ScenarioAssembly {
  std::shared_ptr<const KinematicTree> tree;
  std::shared_ptr<const CentroidalModel> plannerModel;
  std::shared_ptr<const CentroidalOcp> problem;
  std::shared_ptr<MpcRuntime> runtime;
  std::shared_ptr<Plant> plant;
  vector_t initialState;
  EpisodeConfig episode;
  AlSettings solverSettings;
};

/// Variant selection for the comparative study.
struct AssemblyOptions {
  bool srbd = false;
  bool plannerSeesObject = true;
  std::optional<scalar_t> liftTimeOverride;
  std::optional<scalar_t> durationOverride;
  std::optional<std::uint64_t> seedOverride;
  std::optional<bool> disturbanceOverride;
  std::optional<bool> lockstepOverride;
};

ScenarioAssembly buildScenario(const Scenario& scenario, const AssemblyOptions& options = {});

}  // namespace wbmpc
