#pragma once

#include "wbmpc/dynamics/centroidal_model.hpp"
#include "wbmpc/solver/slq.hpp"

namespace wbmpc {

/// World-frame base twist from the pose-parameter rates:
/// (v_IB, w_IB) = blkdiag(I, T(euler)) * qdot_b.
vector6_t baseTwistFromPoseRates(const vector3_t& eulerZyx, const vector6_t& basePoseRates);

struct BaseAcceleration {
  vector6_t poseRates;       // qdot_b
  vector6_t poseAccel;       // qddot_b
  vector3_t linearWorld;     // vdot_IB
  vector3_t angularWorld;    // wdot_IB
};

/// Feedforward base acceleration along a planned sample:
/// qddot_b = A_b^{-1} (hdot_com - Adot qdot - A_j qddot_j), lifted to world
/// rates through T and Tdot. `jointAccel` comes from finite differences of
/// the planned joint velocities.
BaseAcceleration baseAcceleration(const CentroidalModel& model, const vector_t& x, const vector_t& u,
                                  const vector_t& jointAccel);

struct FootReference {
  vector3_t position;
  vector3_t velocity;
  vector3_t acceleration;
};

/// Task-space contact references r, rdot = J qdot, rddot = J qddot + Jdot qdot.
/// The Jdot qdot term uses a finite difference of the Jacobian along the
/// trajectory by default; `exact` switches to the velocity-product recursion.
FootReference footReference(const CentroidalModel& model, const vector_t& x, const vector_t& u,
                            const vector_t& jointAccel, int contactIndex, bool exact,
                            const vector_t* xNext = nullptr, scalar_t dtNext = 0.0);

/// One sample of the MPC-to-tracking interface.
struct TrackingSample {
  scalar_t time = 0.0;
  vector6_t basePose;
  vector6_t baseVelocityWorld;      // (v_IB, w_IB)
  vector6_t baseAccelerationWorld;  // (vdot_IB, wdot_IB)
  std::vector<FootReference> contacts;
  vector_t armJointPositions;
  vector_t armJointVelocities;
  vector_t armJointAccelerations;
  vector3_t armContactForce = vector3_t::Zero();
};

struct TrackingReferences {
  scalar_t sampleDt = 0.0;
  std::vector<TrackingSample> samples;
};

/// Samples the solution on a uniform grid of spacing `sampleDt`.
TrackingReferences buildTrackingReferences(const CentroidalModel& model, const SolverSolution& solution,
                                           scalar_t sampleDt, bool exactFootAcceleration);

}  // namespace wbmpc
