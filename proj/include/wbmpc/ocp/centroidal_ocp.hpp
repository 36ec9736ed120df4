#pragma once

#include "wbmpc/constraints/constraint_bank.hpp"
#include "wbmpc/ocp/cost.hpp"
#include "wbmpc/ocp/problem.hpp"

namespace wbmpc {

/// Whole-body OCP of the augmented centroidal system: tracking cost,
/// mode-dependent contact constraints, and the flow map, sharing one
/// kinematics sweep per node for the full LQ linearization.
class CentroidalOcp final : public OcpProblem {
 public:
  CentroidalOcp(std::shared_ptr<const CentroidalModel> model,
                std::shared_ptr<const SwingReferenceProvider> swing, Limits limits,
                TaskCostWeights weights, TaskReferences references);

  int stateDim() const override { return model_->dims().stateDim(); }
  int inputDim() const override { return model_->dims().inputDim(); }

  vector_t flow(scalar_t t, const vector_t& x, const vector_t& u, const ContactFlags& mode) const override;
  scalar_t stageCost(scalar_t t, const vector_t& x, const vector_t& u,
                     const ContactFlags& mode) const override;
  scalar_t terminalCost(const vector_t& x) const override;
  CostQuadratics terminalQuadratics(const vector_t& x) const override;
  LqNode linearizeNode(scalar_t t, const vector_t& x, const vector_t& u,
                       const ContactFlags& mode) const override;
  vector_t inequalityResiduals(scalar_t t, const vector_t& x, const vector_t& u,
                               const ContactFlags& mode) const override;
  vector_t equalityResiduals(scalar_t t, const vector_t& x, const vector_t& u,
                             const ContactFlags& mode) const override;
  StagePieces stagePieces(scalar_t t, const vector_t& x, const vector_t& u,
                          const ContactFlags& mode) const override;
  vector_t initialInput(scalar_t t, const vector_t& x, const ContactFlags& mode) const override;

  /// Gravity-distributing input reference used by the effort-regularization
  /// term (stance feet share the weight, the arm tracks its force reference).
  vector_t inputReference(scalar_t t, const ContactFlags& mode) const;

  const CentroidalModel& model() const { return *model_; }
  const ConstraintBank& constraintBank() const { return *bank_; }
  const TaskCostWeights& weights() const { return weights_; }
  const TaskReferences& references() const { return references_; }

 private:
  scalar_t costValue(scalar_t t, const vector_t& x, const vector_t& u, const ContactFlags& mode,
                     const ModelEvaluation& eval) const;
  void addCostQuadratics(scalar_t t, const vector_t& x, const vector_t& u, const ContactFlags& mode,
                         const ModelEvaluation& eval,
                         const std::vector<std::pair<ModelEvaluation, ModelEvaluation>>& qPerturbed,
                         scalar_t qStep, CostQuadratics& quad) const;
  vector3_t eeOrientationError(scalar_t t, const KinematicsCache& kin) const;

  std::shared_ptr<const CentroidalModel> model_;
  std::shared_ptr<ConstraintBank> bank_;
  TaskCostWeights weights_;
  TaskReferences references_;
  int eeLink_ = -1;
  int eeContact_ = -1;
};

}  // namespace wbmpc
