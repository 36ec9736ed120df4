#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "test_models.hpp"
#include "wbmpc/mpc/mpc_runtime.hpp"

using namespace wbmpc;
using namespace wbmpc::test;

namespace {

struct Rig {
  std::shared_ptr<const KinematicTree> tree;
  std::shared_ptr<const CentroidalModel> model;
  std::shared_ptr<const CentroidalOcp> problem;
  vector_t x0;
};

Rig makeRig() {
  Rig r;
  r.tree = std::make_shared<const KinematicTree>(quadrupedLite());
  r.model = std::make_shared<const CentroidalModel>(r.tree, nullptr);
  const auto& dims = r.model->dims();
  r.x0 = vector_t::Zero(dims.stateDim());
  r.x0.segment(6, r.tree->numQ()) = standingConfiguration(*r.tree);

  TaskCostWeights w;
  w.robotState = vector_t::Zero(dims.robotStateDim());
  w.robotState.segment<3>(0).setConstant(0.5);
  w.robotState.segment<3>(3).setConstant(1.0);
  w.robotState.segment<3>(6).setConstant(500.0);
  w.robotState.segment<3>(9).setConstant(300.0);
  w.robotState.tail(dims.numJoints).setConstant(20.0);
  w.terminalRobotState = 2.0 * w.robotState;
  w.object = vector_t::Zero(0);
  w.terminalObject = vector_t::Zero(0);
  w.input = vector_t::Zero(dims.inputDim());
  w.input.head(3 * dims.numContacts).setConstant(1e-3);
  w.input.tail(dims.numJoints).setConstant(0.5);

  TaskReferences refs;
  refs.robotState = ReferenceTrajectory::constant(r.x0.head(dims.robotStateDim()));
  r.problem = std::make_shared<CentroidalOcp>(r.model, nullptr, Limits(), w, refs);
  return r;
}

MpcConfig shortConfig() {
  MpcConfig cfg;
  cfg.horizon = 0.4;
  cfg.dt = 0.02;
  cfg.referenceSampleDt = 0.02;
  return cfg;
}

}  // namespace

TEST_CASE("conversions: base twist map at zero attitude and zero rates") {
  CHECK(baseTwistFromPoseRates(vector3_t::Zero(), (vector6_t() << 1, 2, 3, 4, 5, 6).finished())
            .isApprox((vector6_t() << 1, 2, 3, 4, 5, 6).finished()));
  CHECK(eulerRateMapDerivative(vector3_t(0.3, 0.2, -0.4), vector3_t::Zero()).norm() == 0.0);
}

TEST_CASE("conversions: static equilibrium has zero base acceleration") {
  auto r = makeRig();
  const auto& dims = r.model->dims();
  const vector_t u = r.problem->initialInput(0.0, r.x0, ContactFlags{true, true, true, true, false});
  const auto acc = baseAcceleration(*r.model, r.x0, u, vector_t::Zero(dims.numJoints));
  CHECK(acc.poseAccel.norm() < 1e-9);
  CHECK(acc.linearWorld.norm() < 1e-9);
  CHECK(acc.angularWorld.norm() < 1e-9);
}

TEST_CASE("conversions: single rigid body in free fall") {
  auto tree = std::make_shared<const KinematicTree>(singleBody(3.0, vector3_t(0.05, -0.02, 0.1)));
  const CentroidalModel model(tree, nullptr);
  vector_t x = vector_t::Zero(model.dims().stateDim());
  x(8) = 1.0;  // base height
  const vector_t u = vector_t::Zero(model.dims().inputDim());
  const auto acc = baseAcceleration(model, x, u, vector_t::Zero(0));
  CHECK((acc.linearWorld - vector3_t(0.0, 0.0, -kGravity)).norm() < 1e-10);
  CHECK(acc.angularWorld.norm() < 1e-10);
}

TEST_CASE("conversions: base acceleration matches finite differences along the flow") {
  auto r = makeRig();
  const auto& dims = r.model->dims();
  std::mt19937_64 rng(71);

  for (int trial = 0; trial < 10; ++trial) {
    vector_t x = vector_t::Zero(dims.stateDim());
    x.segment(6, r.tree->numQ()) = randomConfiguration(*r.tree, rng, 0.6);
    x.head<6>() = randomVector(6, rng, 3.0);
    const vector_t u = randomVector(dims.inputDim(), rng, 15.0);

    // Propagate the flow a tiny step in both directions; v_j constant means
    // qddot_j = 0 along this flow.
    const scalar_t eps = 1e-6;
    const vector_t xp = x + eps * r.model->flow(0.0, x, u);
    const vector_t xm = x - eps * r.model->flow(0.0, x, u);
    const auto evalP = r.model->evaluate(dims.configuration(xp), false);
    const auto evalM = r.model->evaluate(dims.configuration(xm), false);
    const vector6_t fd =
        (r.model->baseRate(evalP, xp, u) - r.model->baseRate(evalM, xm, u)) / (2.0 * eps);

    const auto acc = baseAcceleration(*r.model, x, u, vector_t::Zero(dims.numJoints));
    CHECK(relativeError(acc.poseAccel, fd) < 1e-4);
  }
}

TEST_CASE("conversions: foot references are kinematically consistent") {
  auto r = makeRig();
  const auto& dims = r.model->dims();
  std::mt19937_64 rng(72);
  vector_t x = vector_t::Zero(dims.stateDim());
  x.segment(6, r.tree->numQ()) = randomConfiguration(*r.tree, rng, 0.6);
  x.head<6>() = randomVector(6, rng, 2.0);
  const vector_t u = randomVector(dims.inputDim(), rng, 5.0);

  // Velocity = d/dt position along the flow; exact-acceleration form matches
  // the finite difference of the velocity along the flow.
  const scalar_t eps = 1e-6;
  const vector_t flow = r.model->flow(0.0, x, u);
  const vector_t xp = x + eps * flow;
  const vector_t xm = x - eps * flow;

  for (int c = 0; c < dims.numContacts; ++c) {
    const auto ref = footReference(*r.model, x, u, vector_t::Zero(dims.numJoints), c, true);
    const auto refP = footReference(*r.model, xp, u, vector_t::Zero(dims.numJoints), c, true);
    const auto refM = footReference(*r.model, xm, u, vector_t::Zero(dims.numJoints), c, true);
    const vector3_t velFd = (refP.position - refM.position) / (2.0 * eps);
    const vector3_t accFd = (refP.velocity - refM.velocity) / (2.0 * eps);
    CHECK(relativeError(ref.velocity, velFd) < 1e-5);
    CHECK(relativeError(ref.acceleration, accFd) < 1e-3);
  }

  // Base-only motion: the foot moves as a rigid-body point.
  vector_t xBase = x;
  vector_t uBase = vector_t::Zero(dims.inputDim());
  uBase.head(3 * dims.numContacts) = u.head(3 * dims.numContacts);
  const auto eval = r.model->evaluate(dims.configuration(xBase), true);
  const vector6_t qdotB = r.model->baseRate(eval, xBase, uBase);
  const auto refBase = footReference(*r.model, xBase, uBase, vector_t::Zero(dims.numJoints), 0, true);
  const vector3_t omega = eulerRateToAngularVelocityMap(xBase.segment<3>(9)) * qdotB.tail<3>();
  const vector3_t rigidVel =
      qdotB.head<3>() + omega.cross(refBase.position - vector3_t(xBase.segment<3>(6)));
  CHECK((refBase.velocity - rigidVel).norm() < 1e-10);
}

TEST_CASE("mpc step: stationary fixed point yields equilibrium feedforward") {
  auto r = makeRig();
  MpcRuntime runtime(r.problem, GaitSpec{GaitSpec::Name::Stance, 0.8, 0.2}, ManipulationSpec{},
                     shortConfig());
  const auto result = runtime.step(r.x0, 0.0);
  REQUIRE_FALSE(result.usedFallback);
  REQUIRE(result.solution.report.failure.empty());

  const vector_t uEq = r.problem->initialInput(0.0, r.x0, runtime.modeAt(0.0));
  for (int k = 0; k < result.solution.numSteps(); ++k) {
    CHECK((result.solution.inputs[k] - uEq).cwiseAbs().maxCoeff() < 0.5);  // newtons-scale slack
  }
  // Base references essentially constant.
  for (const auto& s : result.references.samples) {
    CHECK((s.basePose - result.references.samples.front().basePose).norm() < 1e-4);
    CHECK(s.baseVelocityWorld.norm() < 1e-3);
  }
}

TEST_CASE("mpc step: replanning immediately from the same state is idempotent") {
  auto r = makeRig();
  MpcRuntime runtime(r.problem, GaitSpec{GaitSpec::Name::Stance, 0.8, 0.2}, ManipulationSpec{},
                     shortConfig());
  const auto first = runtime.step(r.x0, 0.0);
  const auto second = runtime.step(r.x0, 0.0);
  REQUIRE(first.solution.numSteps() == second.solution.numSteps());
  for (int k = 0; k < first.solution.numSteps(); ++k) {
    CHECK((first.solution.inputs[k] - second.solution.inputs[k]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((first.solution.states[k] - second.solution.states[k]).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("mpc step: references stay continuous across a handover") {
  auto r = makeRig();
  MpcConfig cfg = shortConfig();
  MpcRuntime runtime(r.problem, GaitSpec{GaitSpec::Name::Stance, 0.8, 0.2}, ManipulationSpec{}, cfg);
  const auto first = runtime.step(r.x0, 0.0);

  // Feed back exactly the predicted state at the handover time.
  const scalar_t tHand = 0.1;
  const vector_t xPredicted = first.solution.stateAt(tHand);
  const auto second = runtime.step(xPredicted, tHand);

  const auto& a = first.references.samples;
  const auto& b = second.references.samples;
  // Compare overlapping samples (b starts at tHand).
  for (const auto& sb : b) {
    if (sb.time > a.back().time + 1e-9) {
      break;
    }
    const int ia = static_cast<int>(std::round((sb.time - a.front().time) / first.references.sampleDt));
    if (ia < 0 || ia >= static_cast<int>(a.size()) ||
        std::abs(a[ia].time - sb.time) > 1e-9) {
      continue;
    }
    CHECK((a[ia].basePose - sb.basePose).norm() < 5e-3);
    CHECK((a[ia].baseVelocityWorld - sb.baseVelocityWorld).norm() < 5e-2);
  }
}

TEST_CASE("mpc step: per-replan iteration budget is honored") {
  auto r = makeRig();
  MpcConfig cfg = shortConfig();
  cfg.rtInnerIterations = 1;
  cfg.rtOuterIterations = 1;
  MpcRuntime runtime(r.problem, GaitSpec{GaitSpec::Name::Stance, 0.8, 0.2}, ManipulationSpec{}, cfg);
  (void)runtime.step(r.x0, 0.0);  // cold start solves fully
  const auto rt = runtime.step(r.x0, 0.015);
  CHECK(rt.solution.report.innerIterations <= 1);
  CHECK(rt.solution.report.outerIterations <= 1);
}

TEST_CASE("mpc step: trot schedule is re-anchored in absolute time") {
  auto r = makeRig();
  MpcConfig cfg = shortConfig();
  cfg.horizon = 0.8;
  GaitSpec trot{GaitSpec::Name::Trot, 0.4, 0.2};
  MpcRuntime runtime(r.problem, trot, ManipulationSpec{}, cfg);
  const auto modeNow = runtime.modeAt(0.95);
  const auto expected = gaitModeAt(trot, ContactLayout{5, {0, 1, 2, 3}, 4}, 0.95);
  CHECK(toString(modeNow) == toString(expected));
}
