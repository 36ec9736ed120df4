#include "wbmpc/cli/scenario.hpp"
#include "wbmpc/kinematics/ik.hpp"
#include "wbmpc/kinematics/model_io.hpp"

namespace wbmpc {

namespace {

std::shared_ptr<const ObjectModel> makeObject(const Scenario::Object& o) {
  if (!o.present) {
    return nullptr;
  }
  if (o.type == "door") {
    DoorParams p;
    p.inertia = o.inertia;
    p.damping = o.damping;
    p.spring = o.spring;
    p.recoilTorque = o.recoil;
    p.hingePosition = o.hingePosition;
    p.hingeAxis = o.hingeAxis.normalized();
    p.handleOffset = o.handleOffset;
    return makeDoorModel(p);
  }
  PointMassParams p;
  p.mass = o.mass;
  p.direction = o.direction.normalized();
  p.damping = o.damping;
  p.spring = o.spring;
  p.startPosition = o.startPosition;
  p.gravityLoaded = o.gravityLoaded;
  return makePointMassModel(p);
}

TaskCostWeights makeWeights(const Scenario& s, const SystemDims& dims, const KinematicTree& tree) {
  TaskCostWeights w;
  w.alpha1 = s.cost.alpha1;
  w.alpha2 = s.cost.alpha2;
  w.alpha3 = s.cost.alpha3;

  w.robotState = vector_t::Zero(dims.robotStateDim());
  w.robotState.segment<3>(0).setConstant(s.cost.momentumLinear);
  w.robotState.segment<3>(3).setConstant(s.cost.momentumAngular);
  w.robotState.segment<3>(6).setConstant(s.cost.basePosition);
  w.robotState.segment<3>(9).setConstant(s.cost.baseOrientation);
  w.robotState.tail(dims.numJoints).setConstant(s.cost.legJoints);
  for (int a : tree.armJoints()) {
    w.robotState(12 + a) = s.cost.armJoints;
  }

  w.object = vector_t::Zero(2 * dims.objectDim);
  if (dims.objectDim > 0) {
    w.object.head(dims.objectDim).setConstant(s.cost.objectPosition);
    w.object.tail(dims.objectDim).setConstant(s.cost.objectVelocity);
  }
  w.eePosition.setConstant(s.cost.eePosition);
  w.eeOrientation.setConstant(s.cost.eeOrientation);

  w.input = vector_t::Zero(dims.inputDim());
  w.input.head(3 * dims.numContacts).setConstant(s.cost.forces);
  if (tree.armContactIndex() >= 0 && s.cost.armForces > 0.0) {
    w.input.segment<3>(3 * tree.armContactIndex()).setConstant(s.cost.armForces);
  }
  w.input.tail(dims.numJoints).setConstant(s.cost.legJointVelocities);
  for (int a : tree.armJoints()) {
    w.input(3 * dims.numContacts + a) = s.cost.armJointVelocities;
  }

  w.terminalRobotState = s.cost.terminalScale * w.robotState;
  w.terminalObject = s.cost.terminalScale * w.object;
  w.terminalEePosition = s.cost.terminalScale * w.eePosition;
  w.terminalEeOrientation = s.cost.terminalScale * w.eeOrientation;
  return w;
}

GaitSpec makeGait(const Scenario& s) {
  GaitSpec g;
  g.name = gaitNameFromString(s.gait.name);
  g.cycleDuration = s.gait.cycle;
  g.flightRatio = s.gait.flightRatio;
  return g;
}

ManipulationSpec makeManipulation(const Scenario& s, bool plannerSeesObject) {
  ManipulationSpec m;
  if (!plannerSeesObject) {
    m.kind = ManipulationSpec::Kind::None;  // no grasp semantics without an object model
    return m;
  }
  if (s.manipulation.kind == "grasped") {
    m.kind = ManipulationSpec::Kind::Grasped;
  } else if (s.manipulation.kind == "release_at") {
    m.kind = ManipulationSpec::Kind::ReleaseAt;
    m.switchTime = s.manipulation.switchTime;
  } else {
    m.kind = ManipulationSpec::Kind::None;
  }
  return m;
}

}  // namespace

ScenarioAssembly buildScenario(const Scenario& scenario, const AssemblyOptions& options) {
  ScenarioAssembly a;
  a.tree = std::make_shared<const KinematicTree>(loadModel(scenario.modelPath));
  const auto& tree = *a.tree;

  const bool comparative = scenario.task == TaskKind::ComparativeLift;
  const bool plannerSeesObject = scenario.object.present && options.plannerSeesObject;
  std::shared_ptr<const ObjectModel> object = plannerSeesObject ? makeObject(scenario.object) : nullptr;

  // Initial configuration.
  vector_t q0 = vector_t::Zero(tree.numQ());
  q0.head<6>() = scenario.initial.basePose;
  if (scenario.initial.jointPositions.size() > 0) {
    if (scenario.initial.jointPositions.size() != tree.numJoints()) {
      throw ScenarioValidationError("scenario: initial/joint_positions must have " +
                                    std::to_string(tree.numJoints()) + " entries");
    }
    q0.tail(tree.numJoints()) = scenario.initial.jointPositions;
  }
  if (scenario.initial.settleToGround) {
    const auto cache = forwardKinematics(tree, q0);
    scalar_t minZ = 1e9;
    for (int c = 0; c < tree.numContacts(); ++c) {
      if (tree.contact(c).type == ContactClass::Foot) {
        minZ = std::min(minZ, contactPosition(tree, cache, c).z());
      }
    }
    q0(2) -= minZ;
  }
  auto scenarioObjectModel = makeObject(scenario.object);  // geometry source even when unseen
  if (scenario.initial.snapHandToHandle && scenario.object.present && tree.armContactIndex() >= 0) {
    const vector3_t handle =
        scenarioObjectModel->handlePosition(scenario.object.initialState.head(1));
    solveArmIk(tree, q0, tree.armContactIndex(), handle);
  }

  // Planner model, possibly the SRBD variant frozen at the initial pose.
  CentroidalModel::Settings modelSettings;
  modelSettings.srbd = options.srbd;
  if (options.srbd) {
    modelSettings.nominalConfiguration = q0;
  }
  a.plannerModel = std::make_shared<const CentroidalModel>(a.tree, object, modelSettings);
  const auto& dims = a.plannerModel->dims();

  a.initialState = vector_t::Zero(dims.stateDim());
  a.initialState.segment(6, tree.numQ()) = q0;
  if (dims.objectDim > 0) {
    a.initialState.tail(2) = scenario.object.initialState;
  }

  // References.
  const scalar_t rampStart = scenario.references.rampStart;
  scalar_t rampEnd = scenario.references.rampEnd;
  if (options.liftTimeOverride) {
    rampEnd = rampStart + *options.liftTimeOverride;
  }
  TaskReferences refs;
  {
    vector_t xr0 = a.initialState.head(dims.robotStateDim());
    vector_t xr1 = xr0;
    xr1.segment<6>(6) += scenario.references.baseOffset;
    if (scenario.references.baseOffset.norm() > 0.0) {
      refs.robotState = ReferenceTrajectory({rampStart, rampEnd}, {xr0, xr1});
    } else {
      refs.robotState = ReferenceTrajectory::constant(xr0);
    }
  }
  scalar_t objectTarget = scenario.object.initialState(0);
  if (scenario.references.objectTarget) {
    objectTarget = *scenario.references.objectTarget;
  } else if (comparative) {
    objectTarget = scenario.object.initialState(0) + scenario.study.displacement;
  }
  if (dims.objectDim > 0) {
    vector_t xo0 = scenario.object.initialState;
    vector_t xo1 = xo0;
    xo1(0) = objectTarget;
    xo1(1) = 0.0;
    refs.object = ReferenceTrajectory({rampStart, rampEnd}, {xo0, xo1});
  }

  vector3_t handStart = vector3_t::Zero();
  if (tree.armContactIndex() >= 0) {
    handStart = contactPosition(tree, forwardKinematics(tree, q0), tree.armContactIndex());
  }
  if (scenario.references.eeOffset || (comparative && !plannerSeesObject)) {
    const vector3_t offset = scenario.references.eeOffset
                                 ? *scenario.references.eeOffset
                                 : vector3_t(scenario.study.displacement *
                                             scenario.object.direction.normalized());
    refs.eePosition =
        ReferenceTrajectory({rampStart, rampEnd}, {handStart, vector3_t(handStart + offset)});
  }
  if (scenario.references.armForce) {
    refs.armForce = ReferenceTrajectory::constant(*scenario.references.armForce);
  }

  // Cost weights, with the comparative without-object variants re-targeted to
  // the end-effector.
  TaskCostWeights weights = makeWeights(scenario, dims, tree);
  if (comparative && !plannerSeesObject) {
    weights.alpha1 = true;
    weights.alpha3 = false;
    if (weights.eePosition.norm() == 0.0) {
      weights.eePosition.setConstant(std::max(scenario.cost.objectPosition, 100.0));
    }
    weights.terminalEePosition = scenario.cost.terminalScale * weights.eePosition;
    weights.object.setZero();
    weights.terminalObject.setZero();
  }
  weights.validate(dims);

  // Constraint limits and swing references.
  Limits limits;
  limits.frictionCoefficient = scenario.limits.frictionCoefficient;
  limits.coneEpsilon = scenario.limits.coneEpsilon;
  ContactLayout layout;
  layout.numContacts = tree.numContacts();
  for (int c = 0; c < tree.numContacts(); ++c) {
    if (tree.contact(c).type == ContactClass::Foot) {
      layout.feet.push_back(c);
    }
  }
  layout.arm = tree.armContactIndex();
  auto swing = std::make_shared<GaitSwingProvider>(makeGait(scenario), layout, scenario.gait.apexHeight);

  a.problem = std::make_shared<CentroidalOcp>(a.plannerModel, swing, limits, weights, refs);

  // Solver and MPC configuration.
  a.solverSettings.initialPenalty = scenario.solver.initialPenalty;
  a.solverSettings.penaltyGrowth = scenario.solver.penaltyGrowth;
  a.solverSettings.maxPenalty = scenario.solver.maxPenalty;
  a.solverSettings.maxOuterIterations = scenario.solver.maxOuter;
  a.solverSettings.violationTolerance = scenario.solver.violationTolerance;
  a.solverSettings.maxInnerIterations = scenario.solver.maxInner;
  a.solverSettings.innerTolerance = scenario.solver.innerTolerance;
  a.solverSettings.equalityPenalty = scenario.solver.equalityPenalty;

  MpcConfig mpcConfig;
  mpcConfig.horizon = scenario.mpc.horizon;
  mpcConfig.dt = scenario.mpc.dt;
  mpcConfig.rtInnerIterations = scenario.mpc.rtInner;
  mpcConfig.rtOuterIterations = scenario.mpc.rtOuter;
  mpcConfig.fullFirstSolve = scenario.mpc.fullFirstSolve;
  mpcConfig.referenceSampleDt = scenario.mpc.referenceDt;

  a.runtime = std::make_shared<MpcRuntime>(a.problem, makeGait(scenario),
                                           makeManipulation(scenario, plannerSeesObject), mpcConfig,
                                           a.solverSettings);

  // Plant: same template dynamics, optionally perturbed. The comparative
  // variants that hide the object from the planner carry it as a payload
  // rigidly attached to the gripper instead.
  PlantConfig plantConfig;
  plantConfig.dt = scenario.plant.dt;
  PlantPerturbations& pert = plantConfig.perturbations;
  pert.payloadLink = scenario.plant.payloadLink;
  pert.payloadMass = scenario.plant.payloadMass;
  pert.payloadOffset = scenario.plant.payloadOffset;
  pert.frictionOverride = scenario.plant.frictionOverride;
  if (comparative && !plannerSeesObject && tree.armContactIndex() >= 0) {
    const auto& handContact = tree.contact(tree.armContactIndex());
    pert.payloadLink = tree.link(handContact.link).name;
    pert.payloadMass += scenario.object.mass;
    pert.payloadOffset = handContact.offset;
  }

  const bool disturbanceOn = options.disturbanceOverride.value_or(scenario.plant.disturbanceEnabled);
  if (disturbanceOn && scenario.plant.disturbanceEnabled) {
    DisturbanceWindow w;
    w.start = scenario.plant.disturbanceStart;
    w.end = scenario.plant.disturbanceEnd;
    w.baseWrench = scenario.plant.disturbanceBaseWrench;
    if (dims.objectDim > 0) {
      w.objectForce = vector_t::Constant(1, scenario.plant.disturbanceObjectForce);
    }
    plantConfig.disturbances.push_back(w);
  }
  if (scenario.plant.noiseSigma > 0.0) {
    plantConfig.sensorNoiseSigma = vector_t::Constant(dims.stateDim(), scenario.plant.noiseSigma);
  }

  std::shared_ptr<const KinematicTree> plantTree = a.tree;
  if (!pert.payloadLink.empty() && pert.payloadMass != 0.0) {
    plantTree = std::make_shared<const KinematicTree>(perturbTree(tree, pert));
  }
  std::shared_ptr<const ObjectModel> plantObject = object;
  if (plantObject && (scenario.plant.frictionOverride > 0.0 || true)) {
    plantObject = object;  // same parameters; scaling hooks reserved for experiments
  }
  auto plantModel = std::make_shared<const CentroidalModel>(plantTree, plantObject);
  const std::uint64_t seed = options.seedOverride.value_or(scenario.seed);
  a.plant = std::make_shared<Plant>(plantModel, plantConfig, seed);

  // Episode configuration and the tracked signal.
  a.episode.duration = options.durationOverride.value_or(
      options.liftTimeOverride ? rampEnd + scenario.study.settleWindow : scenario.duration);
  a.episode.mpcPeriod = scenario.plant.mpcPeriod;
  a.episode.lockstep = options.lockstepOverride.value_or(true);
  a.episode.seed = seed;

  TrackedSignal tracked;
  if (dims.objectDim > 0 && (scenario.cost.alpha3 || comparative)) {
    tracked.kind = TrackedSignal::Kind::StateChannel;
    tracked.index = dims.objectStart();
    const scalar_t q0obj = scenario.object.initialState(0);
    const scalar_t target = objectTarget;
    const scalar_t t0 = rampStart, t1 = rampEnd;
    tracked.reference = [q0obj, target, t0, t1](scalar_t t) {
      if (t <= t0) return q0obj;
      if (t >= t1) return target;
      return q0obj + (target - q0obj) * (t - t0) / (t1 - t0);
    };
  } else if (comparative || scenario.task == TaskKind::EeTrack ||
             (!plannerSeesObject && scenario.object.present)) {
    tracked.kind = TrackedSignal::Kind::EePositionAxis;
    const vector3_t dir = scenario.object.present ? vector3_t(scenario.object.direction.normalized())
                                                  : vector3_t::UnitZ();
    int axis = 2;
    dir.cwiseAbs().maxCoeff(&axis);
    tracked.index = axis;
    scalar_t start = handStart(axis);
    scalar_t target = start;
    if (scenario.references.eeOffset) {
      target = start + (*scenario.references.eeOffset)(axis);
    } else if (comparative) {
      target = start + scenario.study.displacement * dir(axis);
    }
    const scalar_t t0 = rampStart, t1 = rampEnd;
    tracked.reference = [start, target, t0, t1](scalar_t t) {
      if (t <= t0) return start;
      if (t >= t1) return target;
      return start + (target - start) * (t - t0) / (t1 - t0);
    };
  } else {
    tracked.kind = TrackedSignal::Kind::StateChannel;
    int axis = 0;
    if (scenario.references.baseOffset.norm() > 0.0) {
      scenario.references.baseOffset.cwiseAbs().maxCoeff(&axis);
    }
    tracked.index = 6 + axis;
    const scalar_t start = a.initialState(6 + axis);
    const scalar_t target = start + scenario.references.baseOffset(axis);
    const scalar_t t0 = rampStart, t1 = rampEnd;
    tracked.reference = [start, target, t0, t1](scalar_t t) {
      if (t <= t0) return start;
      if (t >= t1) return target;
      return start + (target - start) * (t - t0) / (t1 - t0);
    };
  }
  a.episode.tracked = tracked;
  return a;
}

}  // namespace wbmpc
