#include "wbmpc/kinematics/ik.hpp"

namespace wbmpc {

scalar_t solveArmIk(const KinematicTree& tree, vector_t& q, int contactIndex,
                    const vector3_t& targetWorld, int iterations, scalar_t damping) {
  const auto& armJoints = tree.armJoints();
  const int na = static_cast<int>(armJoints.size());
  if (na == 0) {
    return (contactPosition(tree, forwardKinematics(tree, q), contactIndex) - targetWorld).norm();
  }

  scalar_t error = 0.0;
  for (int iter = 0; iter < iterations; ++iter) {
    const auto cache = forwardKinematics(tree, q);
    const vector3_t p = contactPosition(tree, cache, contactIndex);
    const vector3_t residual = targetWorld - p;
    error = residual.norm();
    if (error < 1e-10) {
      break;
    }
    const matrix_t J = contactJacobian(tree, cache, contactIndex);
    matrix_t Ja(3, na);
    for (int a = 0; a < na; ++a) {
      Ja.col(a) = J.col(6 + armJoints[a]);
    }
    const matrix_t H = Ja * Ja.transpose() + damping * matrix3_t::Identity();
    const vector_t step = Ja.transpose() * H.ldlt().solve(residual);
    for (int a = 0; a < na; ++a) {
      q(6 + armJoints[a]) += step(a);
    }
  }
  return error;
}

}  // namespace wbmpc
