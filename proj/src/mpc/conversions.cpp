#include "wbmpc/mpc/conversions.hpp"

#include "wbmpc/rotations.hpp"

namespace wbmpc {

vector6_t baseTwistFromPoseRates(const vector3_t& eulerZyx, const vector6_t& basePoseRates) {
  vector6_t twist;
  twist.head<3>() = basePoseRates.head<3>();
  twist.tail<3>() = eulerRateToAngularVelocityMap(eulerZyx) * basePoseRates.tail<3>();
  return twist;
}

BaseAcceleration baseAcceleration(const CentroidalModel& model, const vector_t& x, const vector_t& u,
                                  const vector_t& jointAccel) {
  const auto& dims = model.dims();
  const vector_t q = dims.configuration(x);
  const ModelEvaluation eval = model.evaluate(q, false);

  BaseAcceleration out;
  out.poseRates = model.baseRate(eval, x, u);

  vector_t qdot(q.size());
  qdot.head<6>() = out.poseRates;
  qdot.tail(dims.numJoints) = dims.jointVelocities(u);

  const vector6_t hdot = model.centroidalRate(eval, u);
  const vector6_t bias = centroidalBias(model.tree(), eval.kin, qdot);
  out.poseAccel = eval.baseBlockLu.solve(hdot - bias - eval.cmm.jointBlock * jointAccel);

  const vector3_t euler = q.segment<3>(3);
  const matrix3_t T = eulerRateToAngularVelocityMap(euler);
  const matrix3_t Tdot = eulerRateMapDerivative(euler, out.poseRates.tail<3>());
  out.linearWorld = out.poseAccel.head<3>();
  out.angularWorld = T * out.poseAccel.tail<3>() + Tdot * out.poseRates.tail<3>();
  return out;
}

FootReference footReference(const CentroidalModel& model, const vector_t& x, const vector_t& u,
                            const vector_t& jointAccel, int contactIndex, bool exact,
                            const vector_t* xNext, scalar_t dtNext) {
  const auto& dims = model.dims();
  const auto& tree = model.tree();
  const vector_t q = dims.configuration(x);
  const ModelEvaluation eval = model.evaluate(q, true);

  const BaseAcceleration base = baseAcceleration(model, x, u, jointAccel);
  vector_t qdot(q.size()), qddot(q.size());
  qdot.head<6>() = base.poseRates;
  qdot.tail(dims.numJoints) = dims.jointVelocities(u);
  qddot.head<6>() = base.poseAccel;
  qddot.tail(dims.numJoints) = jointAccel;

  FootReference ref;
  ref.position = eval.contactPos[contactIndex];
  const matrix_t& J = eval.contactJac[contactIndex];
  ref.velocity = J * qdot;

  vector3_t jdotQdot;
  if (exact || xNext == nullptr || dtNext <= 0.0) {
    jdotQdot = pointBiasAcceleration(tree, eval.kin, tree.contact(contactIndex).link, ref.position, qdot);
  } else {
    const ModelEvaluation evalNext = model.evaluate(dims.configuration(*xNext), true);
    jdotQdot = ((evalNext.contactJac[contactIndex] - J) / dtNext) * qdot;
  }
  ref.acceleration = J * qddot + jdotQdot;
  return ref;
}

TrackingReferences buildTrackingReferences(const CentroidalModel& model, const SolverSolution& solution,
                                           scalar_t sampleDt, bool exactFootAcceleration) {
  const auto& dims = model.dims();
  const auto& tree = model.tree();
  const auto& armJoints = tree.armJoints();
  const int armContact = tree.armContactIndex();

  TrackingReferences refs;
  refs.sampleDt = sampleDt;
  const scalar_t t0 = solution.times.front();
  const scalar_t t1 = solution.times.back();
  const int samples = static_cast<int>(std::floor((t1 - t0) / sampleDt + 1e-9)) + 1;

  for (int i = 0; i < samples; ++i) {
    const scalar_t t = t0 + i * sampleDt;
    const int k = solution.intervalIndex(t);
    const vector_t x = solution.stateAt(t);
    const vector_t u = solution.inputs[k];

    // Joint accelerations by forward differences of the planned velocities.
    vector_t jointAccel = vector_t::Zero(dims.numJoints);
    if (k + 1 < solution.numSteps()) {
      const scalar_t h = solution.times[k + 1] - solution.times[k];
      jointAccel = (dims.jointVelocities(solution.inputs[k + 1]) - dims.jointVelocities(u)) / h;
    }

    TrackingSample s;
    s.time = t;
    s.basePose = x.segment<6>(6);
    const BaseAcceleration base = baseAcceleration(model, x, u, jointAccel);
    s.baseVelocityWorld = baseTwistFromPoseRates(x.segment<3>(9), base.poseRates);
    s.baseAccelerationWorld << base.linearWorld, base.angularWorld;

    const vector_t* xNext = nullptr;
    vector_t xNextStorage;
    scalar_t dtNext = 0.0;
    if (k + 1 < static_cast<int>(solution.states.size())) {
      xNextStorage = solution.states[k + 1];
      xNext = &xNextStorage;
      dtNext = solution.times[k + 1] - solution.times[k];
    }
    s.contacts.reserve(dims.numContacts);
    for (int c = 0; c < dims.numContacts; ++c) {
      s.contacts.push_back(
          footReference(model, x, u, jointAccel, c, exactFootAcceleration, xNext, dtNext));
    }

    s.armJointPositions.resize(armJoints.size());
    s.armJointVelocities.resize(armJoints.size());
    s.armJointAccelerations.resize(armJoints.size());
    for (std::size_t a = 0; a < armJoints.size(); ++a) {
      s.armJointPositions(a) = x(12 + armJoints[a]);
      s.armJointVelocities(a) = dims.jointVelocities(u)(armJoints[a]);
      s.armJointAccelerations(a) = jointAccel(armJoints[a]);
    }
    if (armContact >= 0) {
      s.armContactForce = dims.contactForce(u, armContact);
    }
    refs.samples.push_back(std::move(s));
  }
  return refs;
}

}  // namespace wbmpc
