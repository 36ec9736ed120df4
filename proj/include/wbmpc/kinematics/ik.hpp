#pragma once

#include "wbmpc/kinematics/kinematics.hpp"

namespace wbmpc {

/// Damped-least-squares IK on the arm joints only: adjusts the arm portion of
/// q so the given contact point reaches `targetWorld`. Deterministic fixed
/// iteration count; returns the final position error.
scalar_t solveArmIk(const KinematicTree& tree, vector_t& q, int contactIndex,
                    const vector3_t& targetWorld, int iterations = 60, scalar_t damping = 1e-3);

}  // namespace wbmpc
