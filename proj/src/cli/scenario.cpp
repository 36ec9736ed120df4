#include "wbmpc/cli/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "wbmpc/kinematics/ik.hpp"
#include "wbmpc/kinematics/model_io.hpp"

namespace wbmpc {

using nlohmann::json;

namespace {

void rejectUnknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ScenarioValidationError("scenario: unknown field '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void readIf(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    out = j.at(key).get<T>();
  }
}

void readVec(const json& j, const char* key, vector_t& out, int expected, const std::string& where) {
  if (!j.contains(key)) {
    return;
  }
  const auto& a = j.at(key);
  if (!a.is_array() || (expected >= 0 && static_cast<int>(a.size()) != expected)) {
    throw ScenarioValidationError("scenario: " + where + "/" + key + " must be an array" +
                                  (expected >= 0 ? " of " + std::to_string(expected) + " numbers" : ""));
  }
  out.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out(i) = a[i].get<scalar_t>();
  }
}

void readVec3(const json& j, const char* key, vector3_t& out, const std::string& where) {
  vector_t tmp;
  readVec(j, key, tmp, 3, where);
  if (tmp.size() == 3) {
    out = tmp;
  }
}

json toArray(const vector_t& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) {
    a.push_back(v(i));
  }
  return a;
}

}  // namespace

TaskKind taskKindFromString(const std::string& s) {
  if (s == "base_track") return TaskKind::BaseTrack;
  if (s == "ee_track") return TaskKind::EeTrack;
  if (s == "gait_demo") return TaskKind::GaitDemo;
  if (s == "lift") return TaskKind::Lift;
  if (s == "throw") return TaskKind::Throw;
  if (s == "push") return TaskKind::Push;
  if (s == "drag") return TaskKind::Drag;
  if (s == "door_push") return TaskKind::DoorPush;
  if (s == "door_pull") return TaskKind::DoorPull;
  if (s == "comparative_lift") return TaskKind::ComparativeLift;
  throw ScenarioValidationError("scenario: unknown task kind '" + s + "'");
}

std::string toString(TaskKind kind) {
  switch (kind) {
    case TaskKind::BaseTrack: return "base_track";
    case TaskKind::EeTrack: return "ee_track";
    case TaskKind::GaitDemo: return "gait_demo";
    case TaskKind::Lift: return "lift";
    case TaskKind::Throw: return "throw";
    case TaskKind::Push: return "push";
    case TaskKind::Drag: return "drag";
    case TaskKind::DoorPush: return "door_push";
    case TaskKind::DoorPull: return "door_pull";
    case TaskKind::ComparativeLift: return "comparative_lift";
  }
  return "?";
}

Scenario parseScenario(const json& j, const std::string& baseDir) {
  rejectUnknown(j,
                {"name", "task", "model", "duration", "seed", "gait", "manipulation", "initial",
                 "object", "cost", "references", "limits", "mpc", "solver", "plant", "study"},
                "root");
  Scenario s;
  if (!j.contains("name") || !j.contains("task") || !j.contains("model")) {
    throw ScenarioValidationError("scenario: 'name', 'task', and 'model' are required");
  }
  s.name = j.at("name").get<std::string>();
  s.task = taskKindFromString(j.at("task").get<std::string>());
  s.modelPath = j.at("model").get<std::string>();
  if (!s.modelPath.empty() && s.modelPath.front() != '/' && !baseDir.empty()) {
    s.modelPath = baseDir + "/" + s.modelPath;
  }
  readIf(j, "duration", s.duration);
  readIf(j, "seed", s.seed);

  if (j.contains("gait")) {
    const auto& g = j.at("gait");
    rejectUnknown(g, {"name", "cycle_s", "flight_ratio", "apex_m"}, "gait");
    readIf(g, "name", s.gait.name);
    readIf(g, "cycle_s", s.gait.cycle);
    readIf(g, "flight_ratio", s.gait.flightRatio);
    readIf(g, "apex_m", s.gait.apexHeight);
    gaitNameFromString(s.gait.name);  // validates
    if (!(s.gait.cycle > 0.0)) {
      throw ScenarioValidationError("scenario: gait/cycle_s must be positive");
    }
  }
  if (j.contains("manipulation")) {
    const auto& m = j.at("manipulation");
    rejectUnknown(m, {"kind", "t_s"}, "manipulation");
    readIf(m, "kind", s.manipulation.kind);
    readIf(m, "t_s", s.manipulation.switchTime);
    if (s.manipulation.kind != "none" && s.manipulation.kind != "grasped" &&
        s.manipulation.kind != "release_at") {
      throw ScenarioValidationError("scenario: manipulation/kind must be none|grasped|release_at");
    }
  }
  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    rejectUnknown(i, {"base_pose", "joint_positions", "settle_to_ground", "snap_hand_to_handle"},
                  "initial");
    readVec(i, "base_pose", s.initial.basePose, 6, "initial");
    readVec(i, "joint_positions", s.initial.jointPositions, -1, "initial");
    readIf(i, "settle_to_ground", s.initial.settleToGround);
    readIf(i, "snap_hand_to_handle", s.initial.snapHandToHandle);
  }
  if (j.contains("object")) {
    const auto& o = j.at("object");
    rejectUnknown(o,
                  {"type", "inertia", "damping", "spring", "recoil", "hinge_position", "hinge_axis",
                   "handle_offset", "mass", "direction", "start_position", "gravity_loaded", "initial"},
                  "object");
    s.object.present = true;
    readIf(o, "type", s.object.type);
    if (s.object.type != "door" && s.object.type != "point_mass") {
      throw ScenarioValidationError("scenario: object/type must be door|point_mass");
    }
    readIf(o, "inertia", s.object.inertia);
    readIf(o, "damping", s.object.damping);
    readIf(o, "spring", s.object.spring);
    readIf(o, "recoil", s.object.recoil);
    readVec3(o, "hinge_position", s.object.hingePosition, "object");
    readVec3(o, "hinge_axis", s.object.hingeAxis, "object");
    readVec3(o, "handle_offset", s.object.handleOffset, "object");
    readIf(o, "mass", s.object.mass);
    readVec3(o, "direction", s.object.direction, "object");
    readVec3(o, "start_position", s.object.startPosition, "object");
    readIf(o, "gravity_loaded", s.object.gravityLoaded);
    readVec(o, "initial", s.object.initialState, 2, "object");
  }
  if (j.contains("cost")) {
    const auto& c = j.at("cost");
    rejectUnknown(c,
                  {"alpha1", "alpha2", "alpha3", "q_momentum_linear", "q_momentum_angular",
                   "q_base_position", "q_base_orientation", "q_leg_joints", "q_arm_joints",
                   "r_leg_joint_velocities", "r_arm_joint_velocities", "q_object_position",
                   "q_object_velocity", "q_ee_position", "q_ee_orientation", "r_forces",
                   "r_arm_forces", "terminal_scale"},
                  "cost");
    readIf(c, "alpha1", s.cost.alpha1);
    readIf(c, "alpha2", s.cost.alpha2);
    readIf(c, "alpha3", s.cost.alpha3);
    readIf(c, "q_momentum_linear", s.cost.momentumLinear);
    readIf(c, "q_momentum_angular", s.cost.momentumAngular);
    readIf(c, "q_base_position", s.cost.basePosition);
    readIf(c, "q_base_orientation", s.cost.baseOrientation);
    readIf(c, "q_leg_joints", s.cost.legJoints);
    readIf(c, "q_arm_joints", s.cost.armJoints);
    readIf(c, "r_leg_joint_velocities", s.cost.legJointVelocities);
    readIf(c, "r_arm_joint_velocities", s.cost.armJointVelocities);
    readIf(c, "q_object_position", s.cost.objectPosition);
    readIf(c, "q_object_velocity", s.cost.objectVelocity);
    readIf(c, "q_ee_position", s.cost.eePosition);
    readIf(c, "q_ee_orientation", s.cost.eeOrientation);
    readIf(c, "r_forces", s.cost.forces);
    readIf(c, "r_arm_forces", s.cost.armForces);
    readIf(c, "terminal_scale", s.cost.terminalScale);
  }
  if (j.contains("references")) {
    const auto& r = j.at("references");
    rejectUnknown(r, {"base_offset", "ramp_start", "ramp_end", "object_target", "ee_offset", "arm_force"},
                  "references");
    readVec(r, "base_offset", s.references.baseOffset, 6, "references");
    readIf(r, "ramp_start", s.references.rampStart);
    readIf(r, "ramp_end", s.references.rampEnd);
    if (r.contains("object_target")) {
      s.references.objectTarget = r.at("object_target").get<scalar_t>();
    }
    if (r.contains("ee_offset")) {
      vector3_t v = vector3_t::Zero();
      readVec3(r, "ee_offset", v, "references");
      s.references.eeOffset = v;
    }
    if (r.contains("arm_force")) {
      vector3_t v = vector3_t::Zero();
      readVec3(r, "arm_force", v, "references");
      s.references.armForce = v;
    }
  }
  if (j.contains("limits")) {
    const auto& l = j.at("limits");
    rejectUnknown(l, {"mu", "cone_epsilon"}, "limits");
    readIf(l, "mu", s.limits.frictionCoefficient);
    readIf(l, "cone_epsilon", s.limits.coneEpsilon);
  }
  if (j.contains("mpc")) {
    const auto& m = j.at("mpc");
    rejectUnknown(m, {"horizon", "dt", "rt_inner", "rt_outer", "full_first_solve", "reference_dt"},
                  "mpc");
    readIf(m, "horizon", s.mpc.horizon);
    readIf(m, "dt", s.mpc.dt);
    readIf(m, "rt_inner", s.mpc.rtInner);
    readIf(m, "rt_outer", s.mpc.rtOuter);
    readIf(m, "full_first_solve", s.mpc.fullFirstSolve);
    readIf(m, "reference_dt", s.mpc.referenceDt);
  }
  if (j.contains("solver")) {
    const auto& v = j.at("solver");
    rejectUnknown(v,
                  {"rho0", "growth", "max_penalty", "max_outer", "violation_tol", "max_inner",
                   "inner_tol", "equality_penalty"},
                  "solver");
    readIf(v, "rho0", s.solver.initialPenalty);
    readIf(v, "growth", s.solver.penaltyGrowth);
    readIf(v, "max_penalty", s.solver.maxPenalty);
    readIf(v, "max_outer", s.solver.maxOuter);
    readIf(v, "violation_tol", s.solver.violationTolerance);
    readIf(v, "max_inner", s.solver.maxInner);
    readIf(v, "inner_tol", s.solver.innerTolerance);
    readIf(v, "equality_penalty", s.solver.equalityPenalty);
  }
  if (j.contains("plant")) {
    const auto& p = j.at("plant");
    rejectUnknown(p,
                  {"dt", "mpc_period", "payload_link", "payload_mass", "payload_offset",
                   "friction_override", "noise_sigma", "disturbance"},
                  "plant");
    readIf(p, "dt", s.plant.dt);
    readIf(p, "mpc_period", s.plant.mpcPeriod);
    readIf(p, "payload_link", s.plant.payloadLink);
    readIf(p, "payload_mass", s.plant.payloadMass);
    readVec3(p, "payload_offset", s.plant.payloadOffset, "plant");
    readIf(p, "friction_override", s.plant.frictionOverride);
    readIf(p, "noise_sigma", s.plant.noiseSigma);
    if (p.contains("disturbance")) {
      const auto& d = p.at("disturbance");
      rejectUnknown(d, {"start", "end", "base_wrench", "object_force"}, "plant/disturbance");
      s.plant.disturbanceEnabled = true;
      readIf(d, "start", s.plant.disturbanceStart);
      readIf(d, "end", s.plant.disturbanceEnd);
      vector_t w = vector_t::Zero(6);
      readVec(d, "base_wrench", w, 6, "plant/disturbance");
      s.plant.disturbanceBaseWrench = w;
      readIf(d, "object_force", s.plant.disturbanceObjectForce);
    }
  }
  if (j.contains("study")) {
    const auto& st = j.at("study");
    rejectUnknown(st, {"lift_time_grid", "displacement", "settle_window"}, "study");
    if (st.contains("lift_time_grid")) {
      s.study.liftTimeGrid.clear();
      for (const auto& v : st.at("lift_time_grid")) {
        s.study.liftTimeGrid.push_back(v.get<scalar_t>());
      }
    }
    readIf(st, "displacement", s.study.displacement);
    readIf(st, "settle_window", s.study.settleWindow);
  }

  // Task-level consistency.
  const bool needsObject = s.task == TaskKind::Lift || s.task == TaskKind::Throw ||
                           s.task == TaskKind::Push || s.task == TaskKind::Drag ||
                           s.task == TaskKind::DoorPush || s.task == TaskKind::DoorPull ||
                           s.task == TaskKind::ComparativeLift;
  if (needsObject && !s.object.present) {
    throw ScenarioValidationError("scenario: task '" + toString(s.task) + "' requires an object block");
  }
  if ((s.task == TaskKind::DoorPush || s.task == TaskKind::DoorPull) && s.object.type != "door") {
    throw ScenarioValidationError("scenario: door tasks require object/type == door");
  }
  if (needsObject && s.task != TaskKind::DoorPush && s.task != TaskKind::DoorPull &&
      s.object.type != "point_mass") {
    throw ScenarioValidationError("scenario: task '" + toString(s.task) +
                                  "' requires object/type == point_mass");
  }
  if (s.manipulation.kind == "release_at" &&
      (s.manipulation.switchTime <= 0.0 || s.manipulation.switchTime >= s.duration)) {
    throw ScenarioValidationError("scenario: manipulation/t_s must lie inside (0, duration)");
  }
  if (s.object.present && s.manipulation.kind == "none" && s.task != TaskKind::ComparativeLift) {
    throw ScenarioValidationError(
        "scenario: an object without a manipulation schedule cannot be acted on");
  }
  return s;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioValidationError("scenario: cannot open '" + path + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioValidationError("scenario: JSON parse error in '" + path + "': " + e.what());
  }
  return parseScenario(j, std::filesystem::path(path).parent_path().string());
}

json scenarioToJson(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["task"] = toString(s.task);
  j["model"] = s.modelPath;
  j["duration"] = s.duration;
  j["seed"] = s.seed;
  j["gait"] = {{"name", s.gait.name},
               {"cycle_s", s.gait.cycle},
               {"flight_ratio", s.gait.flightRatio},
               {"apex_m", s.gait.apexHeight}};
  j["manipulation"] = {{"kind", s.manipulation.kind}, {"t_s", s.manipulation.switchTime}};
  j["initial"] = {{"base_pose", toArray(s.initial.basePose)},
                  {"settle_to_ground", s.initial.settleToGround},
                  {"snap_hand_to_handle", s.initial.snapHandToHandle}};
  if (s.initial.jointPositions.size() > 0) {
    j["initial"]["joint_positions"] = toArray(s.initial.jointPositions);
  }
  if (s.object.present) {
    j["object"] = {{"type", s.object.type},
                   {"inertia", s.object.inertia},
                   {"damping", s.object.damping},
                   {"spring", s.object.spring},
                   {"recoil", s.object.recoil},
                   {"hinge_position", toArray(s.object.hingePosition)},
                   {"hinge_axis", toArray(s.object.hingeAxis)},
                   {"handle_offset", toArray(s.object.handleOffset)},
                   {"mass", s.object.mass},
                   {"direction", toArray(s.object.direction)},
                   {"start_position", toArray(s.object.startPosition)},
                   {"gravity_loaded", s.object.gravityLoaded},
                   {"initial", toArray(s.object.initialState)}};
  }
  j["cost"] = {{"alpha1", s.cost.alpha1},
               {"alpha2", s.cost.alpha2},
               {"alpha3", s.cost.alpha3},
               {"q_momentum_linear", s.cost.momentumLinear},
               {"q_momentum_angular", s.cost.momentumAngular},
               {"q_base_position", s.cost.basePosition},
               {"q_base_orientation", s.cost.baseOrientation},
               {"q_leg_joints", s.cost.legJoints},
               {"q_arm_joints", s.cost.armJoints},
               {"r_leg_joint_velocities", s.cost.legJointVelocities},
               {"r_arm_joint_velocities", s.cost.armJointVelocities},
               {"q_object_position", s.cost.objectPosition},
               {"q_object_velocity", s.cost.objectVelocity},
               {"q_ee_position", s.cost.eePosition},
               {"q_ee_orientation", s.cost.eeOrientation},
               {"r_forces", s.cost.forces},
               {"r_arm_forces", s.cost.armForces},
               {"terminal_scale", s.cost.terminalScale}};
  j["references"] = {{"base_offset", toArray(s.references.baseOffset)},
                     {"ramp_start", s.references.rampStart},
                     {"ramp_end", s.references.rampEnd}};
  if (s.references.objectTarget) {
    j["references"]["object_target"] = *s.references.objectTarget;
  }
  if (s.references.eeOffset) {
    j["references"]["ee_offset"] = toArray(*s.references.eeOffset);
  }
  if (s.references.armForce) {
    j["references"]["arm_force"] = toArray(*s.references.armForce);
  }
  j["limits"] = {{"mu", s.limits.frictionCoefficient}, {"cone_epsilon", s.limits.coneEpsilon}};
  j["mpc"] = {{"horizon", s.mpc.horizon},
              {"dt", s.mpc.dt},
              {"rt_inner", s.mpc.rtInner},
              {"rt_outer", s.mpc.rtOuter},
              {"full_first_solve", s.mpc.fullFirstSolve},
              {"reference_dt", s.mpc.referenceDt}};
  j["solver"] = {{"rho0", s.solver.initialPenalty},
                 {"growth", s.solver.penaltyGrowth},
                 {"max_penalty", s.solver.maxPenalty},
                 {"max_outer", s.solver.maxOuter},
                 {"violation_tol", s.solver.violationTolerance},
                 {"max_inner", s.solver.maxInner},
                 {"inner_tol", s.solver.innerTolerance},
                 {"equality_penalty", s.solver.equalityPenalty}};
  j["plant"] = {{"dt", s.plant.dt},
                {"mpc_period", s.plant.mpcPeriod},
                {"payload_link", s.plant.payloadLink},
                {"payload_mass", s.plant.payloadMass},
                {"payload_offset", toArray(s.plant.payloadOffset)},
                {"friction_override", s.plant.frictionOverride},
                {"noise_sigma", s.plant.noiseSigma}};
  if (s.plant.disturbanceEnabled) {
    j["plant"]["disturbance"] = {{"start", s.plant.disturbanceStart},
                                 {"end", s.plant.disturbanceEnd},
                                 {"base_wrench", toArray(s.plant.disturbanceBaseWrench)},
                                 {"object_force", s.plant.disturbanceObjectForce}};
  }
  if (s.task == TaskKind::ComparativeLift) {
    json grid = json::array();
    for (scalar_t v : s.study.liftTimeGrid) {
      grid.push_back(v);
    }
    j["study"] = {{"lift_time_grid", grid},
                  {"displacement", s.study.displacement},
                  {"settle_window", s.study.settleWindow}};
  }
  return j;
}

}  // namespace wbmpc
