#pragma once

// Small hand-built trees used across the test suites, plus access to the
// in-repo quadruped_lite model.

#include "wbmpc/kinematics/kinematic_tree.hpp"
#include "wbmpc/kinematics/kinematics.hpp"
#include "wbmpc/kinematics/model_io.hpp"

#ifndef WBMPC_MODEL_DIR
#define WBMPC_MODEL_DIR "models"
#endif

namespace wbmpc::test {

inline matrix3_t diagInertia(scalar_t x, scalar_t y, scalar_t z) {
  return vector3_t(x, y, z).asDiagonal();
}

/// One floating rigid body with an off-origin CoM.
inline KinematicTree singleBody(scalar_t mass = 5.0, const vector3_t& com = {0.1, 0.0, 0.2}) {
  Link base;
  base.name = "body";
  base.parent = -1;
  base.joint = JointType::FloatingBase;
  base.mass = mass;
  base.comOffset = com;
  base.inertia = diagInertia(0.3, 0.4, 0.5);
  return KinematicTree({base}, {}, {});
}

/// Floating base plus one revolute link of length L about the base z axis,
/// with a contact at the tip. The link is declared as the arm.
inline KinematicTree singleLink(scalar_t length = 0.5) {
  Link base;
  base.name = "base";
  base.parent = -1;
  base.joint = JointType::FloatingBase;
  base.mass = 4.0;
  base.inertia = diagInertia(0.1, 0.1, 0.1);

  Link link;
  link.name = "link";
  link.parent = 0;
  link.axis = vector3_t::UnitZ();
  link.placementPos = vector3_t(0.2, 0.0, 0.0);
  link.mass = 1.0;
  link.comOffset = vector3_t(length / 2.0, 0.0, 0.0);
  link.inertia = diagInertia(1e-4, 1e-2, 1e-2);

  ContactPoint tip;
  tip.name = "tip";
  tip.link = 1;
  tip.offset = vector3_t(length, 0.0, 0.0);
  tip.type = ContactClass::Hand;

  return KinematicTree({base, link}, {tip}, {1});
}

/// Planar 2-link arm on a floating base: shoulder and elbow both about +y,
/// links along +x. Used for the hand-statics torque checks.
inline KinematicTree planarArm(scalar_t l1 = 0.4, scalar_t l2 = 0.3, scalar_t m1 = 2.0, scalar_t m2 = 1.0) {
  Link base;
  base.name = "base";
  base.parent = -1;
  base.joint = JointType::FloatingBase;
  base.mass = 10.0;
  base.inertia = diagInertia(0.2, 0.2, 0.2);

  Link upper;
  upper.name = "upper";
  upper.parent = 0;
  upper.axis = vector3_t::UnitY();
  upper.placementPos = vector3_t(0.0, 0.0, 0.1);
  upper.mass = m1;
  upper.comOffset = vector3_t(l1 / 2.0, 0.0, 0.0);
  upper.inertia = diagInertia(1e-3, 1e-2, 1e-2);

  Link fore;
  fore.name = "fore";
  fore.parent = 1;
  fore.axis = vector3_t::UnitY();
  fore.placementPos = vector3_t(l1, 0.0, 0.0);
  fore.mass = m2;
  fore.comOffset = vector3_t(l2 / 2.0, 0.0, 0.0);
  fore.inertia = diagInertia(1e-3, 1e-2, 1e-2);

  ContactPoint hand;
  hand.name = "hand";
  hand.link = 2;
  hand.offset = vector3_t(l2, 0.0, 0.0);
  hand.type = ContactClass::Hand;

  std::vector<JointLimit> limits(2);
  limits[0] = {6.0, 50.0};
  limits[1] = {6.0, 30.0};
  return KinematicTree({base, upper, fore}, {hand}, {1, 2}, limits);
}

/// The 10-joint desk model: four 2-DoF legs plus a 2-DoF arm. Small enough
/// for brute-force oracles, rich enough to exercise every tree code path.
inline KinematicTree deskModel() {
  std::vector<Link> links;
  std::vector<ContactPoint> contacts;

  Link base;
  base.name = "base";
  base.parent = -1;
  base.joint = JointType::FloatingBase;
  base.mass = 8.0;
  base.comOffset = vector3_t(0.0, 0.0, 0.01);
  base.inertia = diagInertia(0.08, 0.25, 0.28);
  links.push_back(base);

  const scalar_t sx[4] = {0.2, 0.2, -0.2, -0.2};
  const scalar_t sy[4] = {0.12, -0.12, 0.12, -0.12};
  const char* names[4] = {"LF", "RF", "LH", "RH"};
  for (int leg = 0; leg < 4; ++leg) {
    Link thigh;
    thigh.name = std::string(names[leg]) + "_thigh";
    thigh.parent = 0;
    thigh.axis = vector3_t::UnitY();
    thigh.placementPos = vector3_t(sx[leg], sy[leg], 0.0);
    thigh.mass = 0.6;
    thigh.comOffset = vector3_t(0.0, 0.0, -0.1);
    thigh.inertia = diagInertia(2e-3, 2e-3, 4e-4);
    const int thighIdx = static_cast<int>(links.size());
    links.push_back(thigh);

    Link shank;
    shank.name = std::string(names[leg]) + "_shank";
    shank.parent = thighIdx;
    shank.axis = vector3_t::UnitY();
    shank.placementPos = vector3_t(0.0, 0.0, -0.2);
    shank.mass = 0.25;
    shank.comOffset = vector3_t(0.0, 0.0, -0.1);
    shank.inertia = diagInertia(1e-3, 1e-3, 2e-4);
    const int shankIdx = static_cast<int>(links.size());
    links.push_back(shank);

    ContactPoint foot;
    foot.name = std::string(names[leg]) + "_foot";
    foot.link = shankIdx;
    foot.offset = vector3_t(0.0, 0.0, -0.2);
    foot.type = ContactClass::Foot;
    contacts.push_back(foot);
  }

  Link shoulder;
  shoulder.name = "arm_shoulder";
  shoulder.parent = 0;
  shoulder.axis = vector3_t::UnitY();
  shoulder.placementPos = vector3_t(0.25, 0.0, 0.04);
  shoulder.mass = 0.7;
  shoulder.comOffset = vector3_t(0.12, 0.0, 0.0);
  shoulder.inertia = diagInertia(4e-4, 4e-3, 4e-3);
  const int shoulderIdx = static_cast<int>(links.size());
  links.push_back(shoulder);

  Link fore;
  fore.name = "arm_fore";
  fore.parent = shoulderIdx;
  fore.axis = vector3_t::UnitY();
  fore.placementPos = vector3_t(0.24, 0.0, 0.0);
  fore.mass = 0.4;
  fore.comOffset = vector3_t(0.1, 0.0, 0.0);
  fore.inertia = diagInertia(2e-4, 2e-3, 2e-3);
  const int foreIdx = static_cast<int>(links.size());
  links.push_back(fore);

  ContactPoint hand;
  hand.name = "hand";
  hand.link = foreIdx;
  hand.offset = vector3_t(0.2, 0.0, 0.0);
  hand.type = ContactClass::Hand;
  contacts.push_back(hand);

  std::vector<JointLimit> limits(10);
  for (auto& l : limits) {
    l = {15.0, 120.0};
  }
  limits[8] = {6.0, 25.0};
  limits[9] = {6.0, 15.0};
  return KinematicTree(std::move(links), std::move(contacts), {shoulderIdx, foreIdx}, std::move(limits));
}

inline KinematicTree quadrupedLite() {
  return loadModel(std::string(WBMPC_MODEL_DIR) + "/quadruped_lite.json");
}

/// Nominal standing configuration of quadruped_lite: X-posed legs, folded
/// arm, base height chosen so the feet touch z = 0.
inline vector_t standingConfiguration(const KinematicTree& tree) {
  vector_t q = vector_t::Zero(tree.numQ());
  const scalar_t hfe = 0.4, kfe = 0.8;
  // LF, RF fore legs; LH, RH hind legs; 3 joints each; then the 4-DoF arm.
  q(6 + 1) = hfe;
  q(6 + 2) = -kfe;
  q(6 + 4) = hfe;
  q(6 + 5) = -kfe;
  q(6 + 7) = -hfe;
  q(6 + 8) = kfe;
  q(6 + 10) = -hfe;
  q(6 + 11) = kfe;
  q(6 + 13) = 0.9;
  q(6 + 14) = -1.8;
  q(6 + 15) = 0.9;

  auto cache = forwardKinematics(tree, q);
  scalar_t minZ = 1e9;
  for (int c = 0; c < tree.numContacts(); ++c) {
    if (tree.contact(c).type == ContactClass::Foot) {
      minZ = std::min(minZ, contactPosition(tree, cache, c).z());
    }
  }
  q(2) = -minZ;
  return q;
}

}  // namespace wbmpc::test
