#pragma once

#include <vector>

#include "wbmpc/kinematics/kinematic_tree.hpp"

namespace wbmpc {

/// World-frame pose data of every link at one configuration, plus the
/// mass-weighted CoM. All downstream model quantities read from this cache.
struct KinematicsCache {
  std::vector<matrix3_t> rot;     // world rotation per link
  std::vector<vector3_t> origin;  // world position of the link/joint frame
  std::vector<vector3_t> com;     // world position of the link CoM
  std::vector<vector3_t> axis;    // world joint axis (index 0 unused)
  vector3_t robotCom = vector3_t::Zero();
  matrix3_t eulerRateMap = matrix3_t::Identity();  // T(eulerZyx)
  vector_t q;
};

/// Centroidal momentum matrix split into base and joint blocks,
/// h_com = A_b * qdot_b + A_j * qdot_j with qdot_b the base pose-parameter
/// rates (Euler-angle rates, not angular velocity).
struct CentroidalMatrix {
  matrix6_t baseBlock;                      // A_b, 6x6
  Eigen::Matrix<scalar_t, 6, Eigen::Dynamic> jointBlock;  // A_j, 6 x n_a

  matrix_t full() const {
    matrix_t A(6, 6 + jointBlock.cols());
    A << baseBlock, jointBlock;
    return A;
  }
};

/// Forward kinematics. Throws SingularConfigurationError when the pitch is
/// inside the guard band.
KinematicsCache forwardKinematics(const KinematicTree& tree, const vector_t& q);

/// World position of contact point `contactIndex`.
vector3_t contactPosition(const KinematicTree& tree, const KinematicsCache& cache, int contactIndex);

/// 3 x (6 + n_a) Jacobian of the world linear velocity of a point fixed to
/// `linkIndex`, with respect to the pose-parameter rates qdot.
matrix_t pointJacobian(const KinematicTree& tree, const KinematicsCache& cache, int linkIndex,
                       const vector3_t& pointWorld);

/// Point Jacobian of a contact point.
matrix_t contactJacobian(const KinematicTree& tree, const KinematicsCache& cache, int contactIndex);

/// 3 x (6 + n_a) Jacobian of the world angular velocity of link `linkIndex`.
matrix_t linkAngularJacobian(const KinematicTree& tree, const KinematicsCache& cache, int linkIndex);

/// Centroidal momentum matrix at the cached configuration. Each link's
/// spatial inertia is projected through its geometric Jacobian into the
/// centroidal frame (world-aligned at the CoM).
CentroidalMatrix centroidalMomentumMatrix(const KinematicTree& tree, const KinematicsCache& cache);

/// Bias Adot * qdot of the centroidal momentum map, from the zero-acceleration
/// velocity-product recursion (gravity-free RNEA forward pass).
vector6_t centroidalBias(const KinematicTree& tree, const KinematicsCache& cache, const vector_t& qdot);

/// Generalized gravity torques of the arm chain (zero velocity/acceleration
/// inverse dynamics restricted to the arm subtree).
vector_t armGravityTorque(const KinematicTree& tree, const KinematicsCache& cache);

/// World velocity of a point fixed to a link, given pose-parameter rates.
vector3_t pointVelocity(const KinematicTree& tree, const KinematicsCache& cache, int linkIndex,
                        const vector3_t& pointWorld, const vector_t& qdot);

/// World acceleration of a point fixed to a link with qddot = 0, i.e. the
/// Jdot * qdot term of the task-space acceleration.
vector3_t pointBiasAcceleration(const KinematicTree& tree, const KinematicsCache& cache, int linkIndex,
                                const vector3_t& pointWorld, const vector_t& qdot);

}  // namespace wbmpc
