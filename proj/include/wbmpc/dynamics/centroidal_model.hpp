#pragma once

#include <memory>
#include <optional>

#include "wbmpc/dynamics/object_model.hpp"
#include "wbmpc/kinematics/kinematics.hpp"

namespace wbmpc {

/// Layout of the augmented state x = (h_com, q_b, q_j [, q_o, v_o]) and the
/// input u = (f_c1..f_cnc, v_j).
struct SystemDims {
  int numJoints = 0;
  int numContacts = 0;
  int objectDim = 0;  // n_o, 0 when no object

  int robotStateDim() const { return 12 + numJoints; }
  int stateDim() const { return robotStateDim() + 2 * objectDim; }
  int inputDim() const { return 3 * numContacts + numJoints; }

  auto momentum(const vector_t& x) const { return x.segment<6>(0); }
  auto basePose(const vector_t& x) const { return x.segment<6>(6); }
  auto jointPositions(const vector_t& x) const { return x.segment(12, numJoints); }
  /// Robot configuration (q_b, q_j) as used by the kinematics engine.
  vector_t configuration(const vector_t& x) const { return x.segment(6, 6 + numJoints); }
  auto objectPosition(const vector_t& x) const { return x.segment(robotStateDim(), objectDim); }
  auto objectVelocity(const vector_t& x) const { return x.segment(robotStateDim() + objectDim, objectDim); }

  auto contactForce(const vector_t& u, int contact) const { return u.segment<3>(3 * contact); }
  auto jointVelocities(const vector_t& u) const { return u.segment(3 * numContacts, numJoints); }

  int momentumStart() const { return 0; }
  int basePoseStart() const { return 6; }
  int jointStart() const { return 12; }
  int objectStart() const { return robotStateDim(); }
  int forceStart(int contact) const { return 3 * contact; }
  int jointVelStart() const { return 3 * numContacts; }
};

/// All configuration-dependent model quantities at one evaluation point;
/// shared by the flow map, constraints, and cost so that a single
/// finite-difference sweep over q serves every consumer.
struct ModelEvaluation {
  KinematicsCache kin;
  CentroidalMatrix cmm;  // the variant's CMM (nominal for SRBD)
  Eigen::PartialPivLU<matrix6_t> baseBlockLu;
  std::vector<vector3_t> contactPos;
  std::vector<matrix_t> contactJac;  // only when built with jacobians
  vector_t armGravity;
  bool hasJacobians = false;
};

/// Augmented centroidal dynamics xdot = f(x, u): Newton-Euler momentum rates,
/// the CMM-based base-pose rate, the joint integrator, and the optional
/// object block. The SRBD variant freezes the CMM at a nominal configuration
/// and drops the joint-velocity contribution to the base rate.
struct CentroidalModelSettings {
  vector3_t gravity = vector3_t(0.0, 0.0, -kGravity);
  bool srbd = false;
  vector_t nominalConfiguration;  // required when srbd
};

class CentroidalModel {
 public:
  using Settings = CentroidalModelSettings;

  CentroidalModel(std::shared_ptr<const KinematicTree> tree, std::shared_ptr<const ObjectModel> object,
                  Settings settings = Settings());

  const SystemDims& dims() const { return dims_; }
  const KinematicTree& tree() const { return *tree_; }
  const ObjectModel* object() const { return object_.get(); }
  const Settings& settings() const { return settings_; }

  ModelEvaluation evaluate(const vector_t& q, bool withJacobians, bool withArmGravity = true,
                           bool checkConditioning = true) const;

  /// Momentum rate of Eq. (3): gravity plus contact-force resultant and the
  /// moment of the contact forces about the CoM (point contacts, no contact
  /// torques).
  vector6_t centroidalRate(const ModelEvaluation& eval, const vector_t& u) const;

  /// Base-pose parameter rate qdot_b = A_b^{-1} (h - A_j v_j).
  vector6_t baseRate(const ModelEvaluation& eval, const vector_t& x, const vector_t& u) const;

  vector_t flow(scalar_t t, const vector_t& x, const vector_t& u) const;
  vector_t flowWithEval(const ModelEvaluation& eval, const vector_t& x, const vector_t& u) const;

  /// Structured linearization: closed forms in (h, f, v_j) and the object
  /// block, a central finite-difference sweep over the configuration block.
  void linearize(scalar_t t, const vector_t& x, const vector_t& u, matrix_t& A, matrix_t& B) const;

  /// Same q-sweep entry point used by the combined OCP linearizer: fills the
  /// configuration-dependent columns from prebuilt perturbed evaluations.
  void linearizeWithEvals(const ModelEvaluation& eval,
                          const std::vector<std::pair<ModelEvaluation, ModelEvaluation>>& qPerturbed,
                          scalar_t qStep, const vector_t& x, const vector_t& u, matrix_t& A,
                          matrix_t& B) const;

  static constexpr scalar_t kFdStep = 1e-6;

 private:
  void checkDimensions(const vector_t& x, const vector_t& u) const;

  std::shared_ptr<const KinematicTree> tree_;
  std::shared_ptr<const ObjectModel> object_;
  Settings settings_;
  SystemDims dims_;
  std::optional<CentroidalMatrix> nominalCmm_;
};

/// Finite-difference oracle of the full flow-map Jacobians; ground truth for
/// the structured provider.
void linearizeFlowFd(const CentroidalModel& model, scalar_t t, const vector_t& x, const vector_t& u,
                     matrix_t& A, matrix_t& B, scalar_t eps = 1e-6);

}  // namespace wbmpc
