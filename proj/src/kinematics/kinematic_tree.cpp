#include "wbmpc/kinematics/kinematic_tree.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "wbmpc/rotations.hpp"

namespace wbmpc {

KinematicTree::KinematicTree(std::vector<Link> links, std::vector<ContactPoint> contacts,
                             std::vector<int> armLinks, std::vector<JointLimit> jointLimits)
    : links_(std::move(links)),
      contacts_(std::move(contacts)),
      armLinks_(std::move(armLinks)),
      jointLimits_(std::move(jointLimits)) {
  validate();

  totalMass_ = 0.0;
  for (const auto& l : links_) {
    totalMass_ += l.mass;
  }

  armJoints_.clear();
  for (int l : armLinks_) {
    armJoints_.push_back(jointOfLink(l));
  }

  if (jointLimits_.empty()) {
    jointLimits_.resize(numJoints());
  }
  if (static_cast<int>(jointLimits_.size()) != numJoints()) {
    throw std::invalid_argument("KinematicTree: joint limit count mismatch");
  }

  // supports_[k][j]: joint j lies on the chain from the base to link k.
  supports_.assign(numLinks(), std::vector<bool>(numJoints(), false));
  supportList_.assign(numLinks(), {});
  for (int k = 1; k < numLinks(); ++k) {
    supports_[k] = supports_[links_[k].parent];
    supports_[k][jointOfLink(k)] = true;
    supportList_[k] = supportList_[links_[k].parent];
    supportList_[k].push_back(jointOfLink(k));
  }

  armContactIndex_ = -1;
  for (int c = 0; c < numContacts(); ++c) {
    if (contacts_[c].type == ContactClass::Hand) {
      if (armContactIndex_ >= 0) {
        throw std::invalid_argument("KinematicTree: more than one hand contact");
      }
      armContactIndex_ = c;
    }
  }
}

void KinematicTree::validate() const {
  if (links_.empty() || links_[0].joint != JointType::FloatingBase || links_[0].parent != -1) {
    throw std::invalid_argument("KinematicTree: link 0 must be the floating base");
  }
  for (int i = 1; i < numLinks(); ++i) {
    const auto& l = links_[i];
    if (l.joint != JointType::Revolute) {
      throw std::invalid_argument("KinematicTree: only one floating base allowed");
    }
    if (l.parent < 0 || l.parent >= i) {
      throw std::invalid_argument("KinematicTree: links must be topologically sorted (parent < index)");
    }
    if (std::abs(l.axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("KinematicTree: joint axis of '" + l.name + "' is not unit length");
    }
  }
  for (const auto& l : links_) {
    if (!(l.mass > 0.0)) {
      throw std::invalid_argument("KinematicTree: link '" + l.name + "' has non-positive mass");
    }
    if ((l.inertia - l.inertia.transpose()).norm() > 1e-9) {
      throw std::invalid_argument("KinematicTree: inertia of '" + l.name + "' is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<matrix3_t> es(l.inertia);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("KinematicTree: inertia of '" + l.name + "' is not positive definite");
    }
  }
  for (const auto& c : contacts_) {
    if (c.link < 0 || c.link >= numLinks()) {
      throw std::invalid_argument("KinematicTree: contact '" + c.name + "' references invalid link");
    }
  }
  for (int l : armLinks_) {
    if (l <= 0 || l >= numLinks()) {
      throw std::invalid_argument("KinematicTree: arm link list references invalid link");
    }
  }
}

int KinematicTree::contactIndex(const std::string& name) const {
  for (int i = 0; i < numContacts(); ++i) {
    if (contacts_[i].name == name) {
      return i;
    }
  }
  return -1;
}

int KinematicTree::linkIndex(const std::string& name) const {
  for (int i = 0; i < numLinks(); ++i) {
    if (links_[i].name == name) {
      return i;
    }
  }
  return -1;
}

bool KinematicTree::jointSupports(int jointIndex, int linkIndex) const {
  return supports_[linkIndex][jointIndex];
}

void checkConfiguration(const KinematicTree& tree, const vector_t& q) {
  if (q.size() != tree.numQ()) {
    throw std::invalid_argument("checkConfiguration: dimension mismatch");
  }
  if (nearPitchSingularity(q.segment<3>(3), tree.pitchGuard())) {
    throw SingularConfigurationError("configuration pitch " + std::to_string(q(4)) +
                                     " rad is inside the ZYX singularity guard band");
  }
}

}  // namespace wbmpc
