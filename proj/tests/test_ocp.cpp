#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_models.hpp"
#include "wbmpc/modes/gait.hpp"
#include "wbmpc/ocp/centroidal_ocp.hpp"
#include "wbmpc/solver/slq.hpp"

using namespace wbmpc;
using namespace wbmpc::test;

namespace {

struct RobotOcp {
  std::shared_ptr<const KinematicTree> tree;
  std::shared_ptr<const CentroidalModel> model;
  std::shared_ptr<CentroidalOcp> problem;
  vector_t x0;
};

TaskCostWeights defaultWeights(const SystemDims& dims) {
  TaskCostWeights w;
  w.robotState = vector_t::Zero(dims.robotStateDim());
  w.robotState.segment<3>(0).setConstant(0.5);   // linear momentum
  w.robotState.segment<3>(3).setConstant(1.0);   // angular momentum
  w.robotState.segment<3>(6).setConstant(500.0); // base position
  w.robotState.segment<3>(9).setConstant(300.0); // base orientation
  w.robotState.tail(dims.numJoints).setConstant(20.0);
  w.terminalRobotState = 2.0 * w.robotState;
  w.object = vector_t::Zero(2 * dims.objectDim);
  w.terminalObject = vector_t::Zero(2 * dims.objectDim);
  w.input = vector_t::Zero(dims.inputDim());
  w.input.head(3 * dims.numContacts).setConstant(1e-3);
  w.input.tail(dims.numJoints).setConstant(0.5);
  return w;
}

RobotOcp makeStanceOcp(std::shared_ptr<const ObjectModel> object = nullptr,
                       Limits limits = Limits()) {
  RobotOcp r;
  r.tree = std::make_shared<const KinematicTree>(quadrupedLite());
  r.model = std::make_shared<const CentroidalModel>(r.tree, object);
  const auto& dims = r.model->dims();

  const vector_t q = standingConfiguration(*r.tree);
  r.x0 = vector_t::Zero(dims.stateDim());
  r.x0.segment(6, r.tree->numQ()) = q;

  TaskCostWeights w = defaultWeights(dims);
  TaskReferences refs;
  vector_t xref = r.x0.head(dims.robotStateDim());
  refs.robotState = ReferenceTrajectory::constant(xref);
  r.problem = std::make_shared<CentroidalOcp>(r.model, nullptr, limits, w, refs);
  return r;
}

OcpDefinition stanceDefinition(const RobotOcp& r, scalar_t T, scalar_t dt) {
  ContactLayout layout;
  layout.numContacts = r.tree->numContacts();
  for (int c = 0; c < r.tree->numContacts(); ++c) {
    if (r.tree->contact(c).type == ContactClass::Foot) {
      layout.feet.push_back(c);
    }
  }
  layout.arm = r.tree->armContactIndex();
  GaitSpec stance{GaitSpec::Name::Stance, 0.8, 0.2};
  OcpDefinition ocp;
  ocp.problem = r.problem;
  ocp.modeSchedule = buildModeSchedule(stance, ManipulationSpec{}, layout, 0.0, T);
  ocp.dt = dt;
  return ocp;
}

}  // namespace

TEST_CASE("robot ocp: structured LQ data matches the finite-difference oracle") {
  auto r = makeStanceOcp();
  AlSettings settings;
  settings.verifyDerivatives = true;
  SlqSolver solver(stanceDefinition(r, 0.09, 0.03), settings);
  const auto sol = solver.solve(r.x0, nullptr, 1, 1);
  CHECK(sol.report.maxDerivativeError < 1e-5);
}

TEST_CASE("robot ocp: stance-hold solve satisfies the contact constraints") {
  auto r = makeStanceOcp();
  SlqSolver solver(stanceDefinition(r, 0.6, 0.03));
  const auto sol = solver.solve(r.x0);
  REQUIRE(sol.report.failure.empty());
  CHECK(sol.report.converged);
  CHECK(sol.report.maxEqualityResidual < 1e-3);
  CHECK(sol.report.maxInequalityViolation < 1e-3);

  // Stance forces carry the weight.
  const scalar_t weight = r.tree->totalMass() * kGravity;
  for (int k = 0; k < sol.numSteps(); ++k) {
    scalar_t fz = 0.0;
    for (int c = 0; c < 4; ++c) {
      fz += sol.inputs[k](3 * c + 2);
    }
    CHECK(fz == doctest::Approx(weight).epsilon(0.02));
  }
}

TEST_CASE("robot ocp: friction cone binds and is respected on a lateral push") {
  Limits tight;
  tight.frictionCoefficient = 0.25;
  tight.coneEpsilon = 0.5;
  auto r = makeStanceOcp(nullptr, tight);

  // Command a fast lateral base shift; the tangential forces hit the cone.
  const auto& dims = r.model->dims();
  vector_t xref = r.x0.head(dims.robotStateDim());
  vector_t xrefEnd = xref;
  xrefEnd(7) += 0.25;  // base y
  TaskReferences refs;
  refs.robotState = ReferenceTrajectory({0.0, 0.4}, {xref, xrefEnd});
  TaskCostWeights w = defaultWeights(dims);
  r.problem = std::make_shared<CentroidalOcp>(r.model, nullptr, tight, w, refs);

  AlSettings settings;
  settings.initialPenalty = 50.0;
  settings.maxOuterIterations = 20;
  SlqSolver solver(stanceDefinition(r, 0.6, 0.03), settings);
  const auto sol = solver.solve(r.x0);
  REQUIRE(sol.report.failure.empty());
  CHECK(sol.report.maxInequalityViolation < 1e-3);

  bool coneActive = false;
  for (const auto& lambda : sol.multipliers) {
    if (lambda.size() > 0 && lambda.tail(4).maxCoeff() > 1e-6) {
      coneActive = true;  // cone rows are the last four in stance
    }
  }
  CHECK(coneActive);
}

TEST_CASE("robot ocp: end-effector tracking moves the hand to the target") {
  auto r = makeStanceOcp();
  const auto& dims = r.model->dims();

  const auto eval = r.model->evaluate(dims.configuration(r.x0), false);
  const vector3_t handStart = contactPosition(*r.tree, eval.kin, r.tree->armContactIndex());
  const vector3_t target = handStart + vector3_t(0.1, 0.08, 0.1);

  TaskCostWeights w = defaultWeights(dims);
  w.alpha1 = true;
  w.eePosition.setConstant(2000.0);
  w.terminalEePosition.setConstant(4000.0);
  w.robotState.tail(dims.numJoints).setConstant(0.2);  // free the arm
  w.terminalRobotState = 2.0 * w.robotState;
  TaskReferences refs;
  refs.robotState = ReferenceTrajectory::constant(r.x0.head(dims.robotStateDim()));
  refs.eePosition = ReferenceTrajectory::constant(target);
  r.problem = std::make_shared<CentroidalOcp>(r.model, nullptr, Limits(), w, refs);

  SlqSolver solver(stanceDefinition(r, 1.0, 0.025));
  const auto sol = solver.solve(r.x0);
  REQUIRE(sol.report.failure.empty());

  const auto evalEnd = r.model->evaluate(dims.configuration(sol.states.back()), false);
  const vector3_t handEnd = contactPosition(*r.tree, evalEnd.kin, r.tree->armContactIndex());
  CHECK((handEnd - target).norm() < 0.03);
  CHECK(sol.report.maxEqualityResidual < 1e-3);
}

TEST_CASE("robot ocp: warm-started re-solve from the same state is idempotent") {
  auto r = makeStanceOcp();
  SlqSolver solver(stanceDefinition(r, 0.5, 0.05));
  const auto first = solver.solve(r.x0);
  REQUIRE(first.report.converged);
  const auto second = solver.solve(r.x0, &first, 1, 1);
  for (int k = 0; k < first.numSteps(); ++k) {
    CHECK((first.inputs[k] - second.inputs[k]).cwiseAbs().maxCoeff() < 1e-10);
  }
}
