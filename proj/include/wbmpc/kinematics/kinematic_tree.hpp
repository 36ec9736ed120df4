#pragma once

#include <string>
#include <vector>

#include "wbmpc/types.hpp"

namespace wbmpc {

enum class JointType { FloatingBase, Revolute };

enum class ContactClass { Foot, Hand };

/// One rigid body of the tree. The link frame coincides with its joint frame;
/// `placement` is the fixed transform from the parent link frame to this
/// joint frame at zero joint angle.
struct Link {
  std::string name;
  int parent = -1;
  JointType joint = JointType::Revolute;
  vector3_t axis = vector3_t::UnitZ();        // joint axis in link frame
  matrix3_t placementRot = matrix3_t::Identity();
  vector3_t placementPos = vector3_t::Zero();
  scalar_t mass = 0.0;
  vector3_t comOffset = vector3_t::Zero();    // link-frame CoM position
  matrix3_t inertia = matrix3_t::Zero();      // about link CoM, link frame
};

struct ContactPoint {
  std::string name;
  int link = -1;
  vector3_t offset = vector3_t::Zero();       // fixed position in link frame
  ContactClass type = ContactClass::Foot;
};

struct JointLimit {
  scalar_t velocityMax = 1e9;   // rad/s
  scalar_t torqueMax = 1e9;     // N*m
};

/// Immutable multibody model: one floating base plus revolute chains.
///
/// Link 0 carries the floating base; link i > 0 owns joint coordinate i-1.
/// Generalized coordinates are q = (r_IB, eulerZyx, q_j) with dimension
/// 6 + numJoints().
class KinematicTree {
 public:
  KinematicTree(std::vector<Link> links, std::vector<ContactPoint> contacts,
                std::vector<int> armLinks, std::vector<JointLimit> jointLimits = {});

  int numLinks() const { return static_cast<int>(links_.size()); }
  int numJoints() const { return numLinks() - 1; }
  int numQ() const { return 6 + numJoints(); }
  int numContacts() const { return static_cast<int>(contacts_.size()); }

  const Link& link(int i) const { return links_[i]; }
  const std::vector<Link>& links() const { return links_; }
  const ContactPoint& contact(int i) const { return contacts_[i]; }
  const std::vector<ContactPoint>& contacts() const { return contacts_; }

  scalar_t totalMass() const { return totalMass_; }

  /// Joint coordinate index of link i (i >= 1).
  static int jointOfLink(int linkIndex) { return linkIndex - 1; }

  /// Links belonging to the arm chain, in tree order.
  const std::vector<int>& armLinks() const { return armLinks_; }
  /// Joint coordinate indices of the arm chain.
  const std::vector<int>& armJoints() const { return armJoints_; }
  int numArmJoints() const { return static_cast<int>(armJoints_.size()); }

  const JointLimit& jointLimit(int jointIndex) const { return jointLimits_[jointIndex]; }

  /// Index into contacts() of the arm end-effector, or -1 when absent.
  int armContactIndex() const { return armContactIndex_; }

  int contactIndex(const std::string& name) const;
  int linkIndex(const std::string& name) const;

  /// True when joint j lies on the path from the base to link `linkIndex`.
  bool jointSupports(int jointIndex, int linkIndex) const;

  /// Joints on the path from the base to the link, ascending.
  const std::vector<int>& supportingJoints(int linkIndex) const { return supportList_[linkIndex]; }

  /// Pitch guard of the ZYX-Euler chart; configurations with
  /// |pitch| > pi/2 - guard are rejected.
  scalar_t pitchGuard() const { return pitchGuard_; }
  void setPitchGuard(scalar_t guard) { pitchGuard_ = guard; }

 private:
  void validate() const;

  std::vector<Link> links_;
  std::vector<ContactPoint> contacts_;
  std::vector<int> armLinks_;
  std::vector<int> armJoints_;
  std::vector<JointLimit> jointLimits_;
  std::vector<std::vector<bool>> supports_;  // supports_[link][joint]
  std::vector<std::vector<int>> supportList_;
  scalar_t totalMass_ = 0.0;
  int armContactIndex_ = -1;
  scalar_t pitchGuard_ = 0.05;
};

/// Thrown when a configuration violates the Euler pitch guard band.
struct SingularConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Validates the pitch guard invariant of a configuration vector.
void checkConfiguration(const KinematicTree& tree, const vector_t& q);

}  // namespace wbmpc
