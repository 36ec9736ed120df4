#include "wbmpc/kinematics/kinematics.hpp"

#include <stdexcept>

#include "wbmpc/rotations.hpp"

namespace wbmpc {

namespace {

matrix3_t axisRotation(const vector3_t& axis, scalar_t angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

/// Twist-space CMM: maps (v_B, omega_B, qdot_j) to h_com.
matrix_t twistCentroidalMatrix(const KinematicTree& tree, const KinematicsCache& cache) {
  const int nq = tree.numQ();
  matrix_t A = matrix_t::Zero(6, nq);
  const vector3_t& c = cache.robotCom;
  const vector3_t& baseOrigin = cache.origin[0];

  for (int k = 0; k < tree.numLinks(); ++k) {
    const Link& link = tree.link(k);
    const scalar_t m = link.mass;
    const vector3_t& ck = cache.com[k];
    const matrix3_t Iw = cache.rot[k] * link.inertia * cache.rot[k].transpose();
    const matrix3_t momentArm = skew(ck - c);

    // Base linear columns: vcol = I, wcol = 0.
    A.block<3, 3>(0, 0) += m * matrix3_t::Identity();
    A.block<3, 3>(3, 0) += m * momentArm;

    // Base angular columns: vcol = -skew(ck - o0), wcol = I.
    const matrix3_t vcolW = -skew(ck - baseOrigin);
    A.block<3, 3>(0, 3) += m * vcolW;
    A.block<3, 3>(3, 3) += Iw + momentArm * (m * vcolW);

    // Supporting joint columns: vcol = a x (ck - oj), wcol = a.
    for (int j : tree.supportingJoints(k)) {
      const int jointLink = j + 1;
      const vector3_t& a = cache.axis[jointLink];
      const vector3_t vcol = a.cross(ck - cache.origin[jointLink]);
      A.block<3, 1>(0, 6 + j) += m * vcol;
      A.block<3, 1>(3, 6 + j) += Iw * a + momentArm * (m * vcol);
    }
  }
  return A;
}

struct LinkMotion {
  vector3_t omega;
  vector3_t omegaDot;
  vector3_t vOrigin;   // velocity of the link frame origin
  vector3_t aOrigin;   // acceleration of the link frame origin
};

/// Velocity and velocity-product acceleration of every link along a flow
/// with qddot = 0 (pose-parameter sense: rddot = 0, eulerddot = 0, qjddot = 0).
std::vector<LinkMotion> propagateMotion(const KinematicTree& tree, const KinematicsCache& cache,
                                        const vector_t& qdot) {
  std::vector<LinkMotion> motion(tree.numLinks());
  const vector3_t eulerRates = qdot.segment<3>(3);
  motion[0].omega = cache.eulerRateMap * eulerRates;
  motion[0].omegaDot = eulerRateMapDerivative(cache.q.segment<3>(3), eulerRates) * eulerRates;
  motion[0].vOrigin = qdot.head<3>();
  motion[0].aOrigin = vector3_t::Zero();

  for (int k = 1; k < tree.numLinks(); ++k) {
    const int p = tree.link(k).parent;
    const auto& mp = motion[p];
    const vector3_t r = cache.origin[k] - cache.origin[p];
    const scalar_t qd = qdot(6 + KinematicTree::jointOfLink(k));
    const vector3_t jointRate = qd * cache.axis[k];

    motion[k].vOrigin = mp.vOrigin + mp.omega.cross(r);
    motion[k].aOrigin = mp.aOrigin + mp.omegaDot.cross(r) + mp.omega.cross(mp.omega.cross(r));
    motion[k].omega = mp.omega + jointRate;
    motion[k].omegaDot = mp.omegaDot + mp.omega.cross(jointRate);
  }
  return motion;
}

}  // namespace

KinematicsCache forwardKinematics(const KinematicTree& tree, const vector_t& q) {
  checkConfiguration(tree, q);

  KinematicsCache cache;
  const int n = tree.numLinks();
  cache.rot.resize(n);
  cache.origin.resize(n);
  cache.com.resize(n);
  cache.axis.resize(n);
  cache.q = q;

  cache.rot[0] = rotationFromEulerZyx(q.segment<3>(3));
  cache.origin[0] = q.head<3>();
  cache.axis[0].setZero();
  cache.eulerRateMap = eulerRateToAngularVelocityMap(q.segment<3>(3));

  for (int k = 1; k < n; ++k) {
    const Link& link = tree.link(k);
    const int p = link.parent;
    const matrix3_t jointFrame = cache.rot[p] * link.placementRot;
    cache.origin[k] = cache.origin[p] + cache.rot[p] * link.placementPos;
    cache.rot[k] = jointFrame * axisRotation(link.axis, q(6 + KinematicTree::jointOfLink(k)));
    cache.axis[k] = jointFrame * link.axis;
  }

  cache.robotCom.setZero();
  for (int k = 0; k < n; ++k) {
    cache.com[k] = cache.origin[k] + cache.rot[k] * tree.link(k).comOffset;
    cache.robotCom += tree.link(k).mass * cache.com[k];
  }
  cache.robotCom /= tree.totalMass();
  return cache;
}

vector3_t contactPosition(const KinematicTree& tree, const KinematicsCache& cache, int contactIndex) {
  const ContactPoint& cp = tree.contact(contactIndex);
  return cache.origin[cp.link] + cache.rot[cp.link] * cp.offset;
}

matrix_t pointJacobian(const KinematicTree& tree, const KinematicsCache& cache, int linkIndex,
                       const vector3_t& pointWorld) {
  matrix_t J = matrix_t::Zero(3, tree.numQ());
  J.block<3, 3>(0, 0).setIdentity();
  J.block<3, 3>(0, 3) = -skew(pointWorld - cache.origin[0]) * cache.eulerRateMap;
  for (int j : tree.supportingJoints(linkIndex)) {
    const int jointLink = j + 1;
    J.col(6 + j) = cache.axis[jointLink].cross(pointWorld - cache.origin[jointLink]);
  }
  return J;
}

matrix_t contactJacobian(const KinematicTree& tree, const KinematicsCache& cache, int contactIndex) {
  const ContactPoint& cp = tree.contact(contactIndex);
  return pointJacobian(tree, cache, cp.link, contactPosition(tree, cache, contactIndex));
}

matrix_t linkAngularJacobian(const KinematicTree& tree, const KinematicsCache& cache, int linkIndex) {
  matrix_t J = matrix_t::Zero(3, tree.numQ());
  J.block<3, 3>(0, 3) = cache.eulerRateMap;
  for (int j = 0; j < tree.numJoints(); ++j) {
    if (tree.jointSupports(j, linkIndex)) {
      J.col(6 + j) = cache.axis[j + 1];
    }
  }
  return J;
}

CentroidalMatrix centroidalMomentumMatrix(const KinematicTree& tree, const KinematicsCache& cache) {
  matrix_t A = twistCentroidalMatrix(tree, cache);
  CentroidalMatrix cmm;
  cmm.baseBlock.leftCols<3>() = A.leftCols<3>();
  cmm.baseBlock.rightCols<3>() = A.middleCols<3>(3) * cache.eulerRateMap;
  cmm.jointBlock = A.rightCols(tree.numJoints());
  return cmm;
}

vector6_t centroidalBias(const KinematicTree& tree, const KinematicsCache& cache, const vector_t& qdot) {
  const auto motion = propagateMotion(tree, cache, qdot);
  const vector3_t& c = cache.robotCom;

  vector6_t hdot = vector6_t::Zero();
  for (int k = 0; k < tree.numLinks(); ++k) {
    const Link& link = tree.link(k);
    const auto& m = motion[k];
    const vector3_t r = cache.com[k] - cache.origin[k];
    const vector3_t aCom = m.aOrigin + m.omegaDot.cross(r) + m.omega.cross(m.omega.cross(r));
    const matrix3_t Iw = cache.rot[k] * link.inertia * cache.rot[k].transpose();

    hdot.head<3>() += link.mass * aCom;
    hdot.tail<3>() += Iw * m.omegaDot + m.omega.cross(Iw * m.omega) +
                      (cache.com[k] - c).cross(link.mass * aCom);
  }
  return hdot;
}

vector_t armGravityTorque(const KinematicTree& tree, const KinematicsCache& cache) {
  const auto& armJoints = tree.armJoints();
  vector_t g = vector_t::Zero(armJoints.size());
  for (std::size_t idx = 0; idx < armJoints.size(); ++idx) {
    const int j = armJoints[idx];
    const int jointLink = j + 1;
    const vector3_t& a = cache.axis[jointLink];
    const vector3_t& o = cache.origin[jointLink];
    for (int k = 0; k < tree.numLinks(); ++k) {
      if (!tree.jointSupports(j, k)) {
        continue;
      }
      // dV/dq_j with V the gravitational potential of the supported links.
      g(idx) += tree.link(k).mass * kGravity * a.cross(cache.com[k] - o).z();
    }
  }
  return g;
}

vector3_t pointVelocity(const KinematicTree& tree, const KinematicsCache& cache, int linkIndex,
                        const vector3_t& pointWorld, const vector_t& qdot) {
  const auto motion = propagateMotion(tree, cache, qdot);
  const auto& m = motion[linkIndex];
  return m.vOrigin + m.omega.cross(pointWorld - cache.origin[linkIndex]);
}

vector3_t pointBiasAcceleration(const KinematicTree& tree, const KinematicsCache& cache, int linkIndex,
                                const vector3_t& pointWorld, const vector_t& qdot) {
  const auto motion = propagateMotion(tree, cache, qdot);
  const auto& m = motion[linkIndex];
  const vector3_t r = pointWorld - cache.origin[linkIndex];
  return m.aOrigin + m.omegaDot.cross(r) + m.omega.cross(m.omega.cross(r));
}

}  // namespace wbmpc
