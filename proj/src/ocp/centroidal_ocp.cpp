#include "wbmpc/ocp/centroidal_ocp.hpp"

#include <Eigen/QR>

#include "wbmpc/rotations.hpp"

namespace wbmpc {

CentroidalOcp::CentroidalOcp(std::shared_ptr<const CentroidalModel> model,
                             std::shared_ptr<const SwingReferenceProvider> swing, Limits limits,
                             TaskCostWeights weights, TaskReferences references)
    : model_(std::move(model)),
      weights_(std::move(weights)),
      references_(std::move(references)) {
  bank_ = std::make_shared<ConstraintBank>(model_, std::move(swing), limits);
  weights_.validate(model_->dims());
  eeContact_ = model_->tree().armContactIndex();
  if (eeContact_ >= 0) {
    eeLink_ = model_->tree().contact(eeContact_).link;
  }
  const bool needsEe = weights_.alpha1 || weights_.terminalEePosition.norm() > 0.0 ||
                       weights_.terminalEeOrientation.norm() > 0.0;
  if (needsEe && eeContact_ < 0) {
    throw std::invalid_argument("CentroidalOcp: end-effector cost requires a hand contact");
  }
}

vector_t CentroidalOcp::flow(scalar_t t, const vector_t& x, const vector_t& u,
                             const ContactFlags&) const {
  return model_->flow(t, x, u);
}

vector3_t CentroidalOcp::eeOrientationError(scalar_t t, const KinematicsCache& kin) const {
  const vector_t eulerRef = references_.eeOrientation.atOrZero(t, 3);
  const matrix3_t Rref = rotationFromEulerZyx(eulerRef);
  return rotationLog(Rref.transpose() * kin.rot[eeLink_]);
}

scalar_t CentroidalOcp::costValue(scalar_t t, const vector_t& x, const vector_t& u,
                                  const ContactFlags& mode, const ModelEvaluation& eval) const {
  const auto& dims = model_->dims();
  scalar_t L = 0.0;

  if (weights_.alpha2) {
    const vector_t err = x.head(dims.robotStateDim()) -
                         references_.robotState.atOrZero(t, dims.robotStateDim());
    L += err.dot(weights_.robotState.cwiseProduct(err));
  }
  if (weights_.alpha3 && dims.objectDim > 0) {
    const vector_t err = x.tail(2 * dims.objectDim) - references_.object.atOrZero(t, 2 * dims.objectDim);
    L += err.dot(weights_.object.cwiseProduct(err));
  }
  if (weights_.alpha1) {
    const vector3_t rErr =
        contactPosition(model_->tree(), eval.kin, eeContact_) - references_.eePosition.atOrZero(t, 3);
    L += rErr.dot(weights_.eePosition.cwiseProduct(rErr));
    if (weights_.eeOrientation.norm() > 0.0) {
      const vector3_t zeta = eeOrientationError(t, eval.kin);
      L += zeta.dot(weights_.eeOrientation.cwiseProduct(zeta));
    }
  }
  const vector_t uErr = u - inputReference(t, mode);
  L += uErr.dot(weights_.input.cwiseProduct(uErr));
  return L;
}

scalar_t CentroidalOcp::stageCost(scalar_t t, const vector_t& x, const vector_t& u,
                                  const ContactFlags& mode) const {
  const ModelEvaluation eval = model_->evaluate(model_->dims().configuration(x), false);
  return costValue(t, x, u, mode, eval);
}

scalar_t CentroidalOcp::terminalCost(const vector_t& x) const {
  const auto& dims = model_->dims();
  const ModelEvaluation eval = model_->evaluate(dims.configuration(x), false);
  const scalar_t t = std::numeric_limits<scalar_t>::max();  // clamp references to their end
  scalar_t phi = 0.0;
  {
    const vector_t err = x.head(dims.robotStateDim()) -
                         references_.robotState.atOrZero(t, dims.robotStateDim());
    phi += err.dot(weights_.terminalRobotState.cwiseProduct(err));
  }
  if (dims.objectDim > 0) {
    const vector_t err = x.tail(2 * dims.objectDim) - references_.object.atOrZero(t, 2 * dims.objectDim);
    phi += err.dot(weights_.terminalObject.cwiseProduct(err));
  }
  if (eeContact_ >= 0 && weights_.terminalEePosition.norm() > 0.0) {
    const vector3_t rErr =
        contactPosition(model_->tree(), eval.kin, eeContact_) - references_.eePosition.atOrZero(t, 3);
    phi += rErr.dot(weights_.terminalEePosition.cwiseProduct(rErr));
  }
  if (eeContact_ >= 0 && weights_.terminalEeOrientation.norm() > 0.0) {
    const vector3_t zeta = eeOrientationError(t, eval.kin);
    phi += zeta.dot(weights_.terminalEeOrientation.cwiseProduct(zeta));
  }
  return phi;
}

CostQuadratics CentroidalOcp::terminalQuadratics(const vector_t& x) const {
  const auto& dims = model_->dims();
  const int nx = dims.stateDim();
  const int nq = 6 + dims.numJoints;
  const scalar_t t = std::numeric_limits<scalar_t>::max();

  CostQuadratics quad;
  quad.value = 0.0;
  quad.dfdx = vector_t::Zero(nx);
  quad.dfdxx = matrix_t::Zero(nx, nx);

  {
    const vector_t err = x.head(dims.robotStateDim()) -
                         references_.robotState.atOrZero(t, dims.robotStateDim());
    quad.value += err.dot(weights_.terminalRobotState.cwiseProduct(err));
    quad.dfdx.head(dims.robotStateDim()) = 2.0 * weights_.terminalRobotState.cwiseProduct(err);
    quad.dfdxx.topLeftCorner(dims.robotStateDim(), dims.robotStateDim()).diagonal() =
        2.0 * weights_.terminalRobotState;
  }
  if (dims.objectDim > 0) {
    const vector_t err = x.tail(2 * dims.objectDim) - references_.object.atOrZero(t, 2 * dims.objectDim);
    quad.value += err.dot(weights_.terminalObject.cwiseProduct(err));
    quad.dfdx.tail(2 * dims.objectDim) = 2.0 * weights_.terminalObject.cwiseProduct(err);
    quad.dfdxx.bottomRightCorner(2 * dims.objectDim, 2 * dims.objectDim).diagonal() =
        2.0 * weights_.terminalObject;
  }

  const bool eePos = eeContact_ >= 0 && weights_.terminalEePosition.norm() > 0.0;
  const bool eeOri = eeContact_ >= 0 && weights_.terminalEeOrientation.norm() > 0.0;
  if (eePos || eeOri) {
    const ModelEvaluation eval = model_->evaluate(dims.configuration(x), true);
    if (eePos) {
      const vector3_t rErr =
          contactPosition(model_->tree(), eval.kin, eeContact_) - references_.eePosition.atOrZero(t, 3);
      const matrix_t& J = eval.contactJac[eeContact_];
      quad.value += rErr.dot(weights_.terminalEePosition.cwiseProduct(rErr));
      quad.dfdx.segment(6, nq) += 2.0 * J.transpose() * weights_.terminalEePosition.cwiseProduct(rErr);
      quad.dfdxx.block(6, 6, nq, nq) +=
          2.0 * J.transpose() * weights_.terminalEePosition.asDiagonal() * J;
    }
    if (eeOri) {
      const vector3_t zeta = eeOrientationError(t, eval.kin);
      matrix_t Jzeta(3, nq);
      const vector_t q = dims.configuration(x);
      for (int i = 0; i < nq; ++i) {
        vector_t qp = q, qm = q;
        qp(i) += CentroidalModel::kFdStep;
        qm(i) -= CentroidalModel::kFdStep;
        const vector3_t zp = eeOrientationError(t, model_->evaluate(qp, false).kin);
        const vector3_t zm = eeOrientationError(t, model_->evaluate(qm, false).kin);
        Jzeta.col(i) = (zp - zm) / (2.0 * CentroidalModel::kFdStep);
      }
      quad.value += zeta.dot(weights_.terminalEeOrientation.cwiseProduct(zeta));
      quad.dfdx.segment(6, nq) += 2.0 * Jzeta.transpose() * weights_.terminalEeOrientation.cwiseProduct(zeta);
      quad.dfdxx.block(6, 6, nq, nq) +=
          2.0 * Jzeta.transpose() * weights_.terminalEeOrientation.asDiagonal() * Jzeta;
    }
  }
  return quad;
}

void CentroidalOcp::addCostQuadratics(
    scalar_t t, const vector_t& x, const vector_t& u, const ContactFlags& mode,
    const ModelEvaluation& eval, const std::vector<std::pair<ModelEvaluation, ModelEvaluation>>& qPerturbed,
    scalar_t qStep, CostQuadratics& quad) const {
  const auto& dims = model_->dims();
  const int nx = dims.stateDim();
  const int nu = dims.inputDim();
  const int nq = 6 + dims.numJoints;

  quad.value = costValue(t, x, u, mode, eval);
  quad.dfdx = vector_t::Zero(nx);
  quad.dfdxx = matrix_t::Zero(nx, nx);
  quad.dfdu = vector_t::Zero(nu);
  quad.dfduu = matrix_t::Zero(nu, nu);
  quad.dfdux = matrix_t::Zero(nu, nx);

  if (weights_.alpha2) {
    const vector_t err = x.head(dims.robotStateDim()) -
                         references_.robotState.atOrZero(t, dims.robotStateDim());
    quad.dfdx.head(dims.robotStateDim()) += 2.0 * weights_.robotState.cwiseProduct(err);
    quad.dfdxx.topLeftCorner(dims.robotStateDim(), dims.robotStateDim()).diagonal() +=
        2.0 * weights_.robotState;
  }
  if (weights_.alpha3 && dims.objectDim > 0) {
    const vector_t err = x.tail(2 * dims.objectDim) - references_.object.atOrZero(t, 2 * dims.objectDim);
    quad.dfdx.tail(2 * dims.objectDim) += 2.0 * weights_.object.cwiseProduct(err);
    quad.dfdxx.bottomRightCorner(2 * dims.objectDim, 2 * dims.objectDim).diagonal() +=
        2.0 * weights_.object;
  }
  if (weights_.alpha1) {
    const vector3_t rErr =
        contactPosition(model_->tree(), eval.kin, eeContact_) - references_.eePosition.atOrZero(t, 3);
    const matrix_t& J = eval.contactJac[eeContact_];
    quad.dfdx.segment(6, nq) += 2.0 * J.transpose() * weights_.eePosition.cwiseProduct(rErr);
    quad.dfdxx.block(6, 6, nq, nq) += 2.0 * J.transpose() * weights_.eePosition.asDiagonal() * J;

    if (weights_.eeOrientation.norm() > 0.0) {
      const vector3_t zeta = eeOrientationError(t, eval.kin);
      matrix_t Jzeta(3, nq);
      for (int i = 0; i < nq; ++i) {
        const vector3_t zp = eeOrientationError(t, qPerturbed[i].first.kin);
        const vector3_t zm = eeOrientationError(t, qPerturbed[i].second.kin);
        Jzeta.col(i) = (zp - zm) / (2.0 * qStep);
      }
      quad.dfdx.segment(6, nq) += 2.0 * Jzeta.transpose() * weights_.eeOrientation.cwiseProduct(zeta);
      quad.dfdxx.block(6, 6, nq, nq) +=
          2.0 * Jzeta.transpose() * weights_.eeOrientation.asDiagonal() * Jzeta;
    }
  }
  const vector_t uErr = u - inputReference(t, mode);
  quad.dfdu += 2.0 * weights_.input.cwiseProduct(uErr);
  quad.dfduu.diagonal() += 2.0 * weights_.input;
}

LqNode CentroidalOcp::linearizeNode(scalar_t t, const vector_t& x, const vector_t& u,
                                    const ContactFlags& mode) const {
  const auto& dims = model_->dims();
  const vector_t q = dims.configuration(x);
  const bool armClosed = eeContact_ >= 0 && mode[eeContact_];
  const ModelEvaluation eval = model_->evaluate(q, true, armClosed);

  std::vector<std::pair<ModelEvaluation, ModelEvaluation>> qPerturbed;
  qPerturbed.reserve(q.size());
  for (int i = 0; i < q.size(); ++i) {
    vector_t qp = q, qm = q;
    qp(i) += CentroidalModel::kFdStep;
    qm(i) -= CentroidalModel::kFdStep;
    qPerturbed.emplace_back(model_->evaluate(qp, true, armClosed, false),
                            model_->evaluate(qm, true, armClosed, false));
  }

  LqNode node;
  model_->linearizeWithEvals(eval, qPerturbed, CentroidalModel::kFdStep, x, u, node.dfdx, node.dfdu);
  addCostQuadratics(t, x, u, mode, eval, qPerturbed, CentroidalModel::kFdStep, node.cost);
  node.equalities = bank_->equalities(t, x, u, mode, eval, qPerturbed, CentroidalModel::kFdStep);
  node.inequalities = bank_->inequalities(x, u, mode, eval, qPerturbed, CentroidalModel::kFdStep);
  return node;
}

vector_t CentroidalOcp::inequalityResiduals(scalar_t, const vector_t& x, const vector_t& u,
                                            const ContactFlags& mode) const {
  const ModelEvaluation eval = model_->evaluate(model_->dims().configuration(x), true);
  const auto blocks = bank_->inequalityResiduals(x, u, mode, eval);
  int rows = 0;
  for (const auto& b : blocks) {
    rows += static_cast<int>(b.residual.size());
  }
  vector_t r(rows);
  int at = 0;
  for (const auto& b : blocks) {
    r.segment(at, b.residual.size()) = b.residual;
    at += static_cast<int>(b.residual.size());
  }
  return r;
}

vector_t CentroidalOcp::equalityResiduals(scalar_t t, const vector_t& x, const vector_t& u,
                                          const ContactFlags& mode) const {
  const ModelEvaluation eval = model_->evaluate(model_->dims().configuration(x), true);
  const auto blocks = bank_->equalityResiduals(t, x, u, mode, eval);
  int rows = 0;
  for (const auto& b : blocks) {
    rows += static_cast<int>(b.residual.size());
  }
  vector_t r(rows);
  int at = 0;
  for (const auto& b : blocks) {
    r.segment(at, b.residual.size()) = b.residual;
    at += static_cast<int>(b.residual.size());
  }
  return r;
}

OcpProblem::StagePieces CentroidalOcp::stagePieces(scalar_t t, const vector_t& x, const vector_t& u,
                                                   const ContactFlags& mode) const {
  const ModelEvaluation eval = model_->evaluate(model_->dims().configuration(x), true);
  StagePieces pieces;
  pieces.cost = costValue(t, x, u, mode, eval);

  const auto eqBlocks = bank_->equalityResiduals(t, x, u, mode, eval);
  int rows = 0;
  for (const auto& b : eqBlocks) {
    rows += static_cast<int>(b.residual.size());
  }
  pieces.equalities.resize(rows);
  int at = 0;
  for (const auto& b : eqBlocks) {
    pieces.equalities.segment(at, b.residual.size()) = b.residual;
    at += static_cast<int>(b.residual.size());
  }

  const auto ineqBlocks = bank_->inequalityResiduals(x, u, mode, eval);
  rows = 0;
  for (const auto& b : ineqBlocks) {
    rows += static_cast<int>(b.residual.size());
  }
  pieces.inequalities.resize(rows);
  at = 0;
  for (const auto& b : ineqBlocks) {
    pieces.inequalities.segment(at, b.residual.size()) = b.residual;
    at += static_cast<int>(b.residual.size());
  }
  return pieces;
}

vector_t CentroidalOcp::inputReference(scalar_t t, const ContactFlags& mode) const {
  // Least-norm gravity-balancing forces (force and moment) at the reference
  // configuration; independent of the decision variables by construction.
  const auto& dims = model_->dims();
  const auto& tree = model_->tree();
  vector_t uRef = vector_t::Zero(dims.inputDim());

  vector3_t fArm = vector3_t::Zero();
  if (eeContact_ >= 0 && mode[eeContact_] && !references_.armForce.empty()) {
    fArm = references_.armForce.at(t);
    uRef.segment<3>(dims.forceStart(eeContact_)) = fArm;
  }

  std::vector<int> closed;
  for (int c = 0; c < dims.numContacts; ++c) {
    if (mode[c] && tree.contact(c).type == ContactClass::Foot) {
      closed.push_back(c);
    }
  }
  if (closed.empty()) {
    return uRef;
  }

  const vector_t xRef = references_.robotState.atOrZero(t, dims.robotStateDim());
  const ModelEvaluation eval = model_->evaluate(xRef.segment(6, 6 + dims.numJoints), false);
  matrix_t W(6, 3 * closed.size());
  for (std::size_t i = 0; i < closed.size(); ++i) {
    W.block<3, 3>(0, 3 * i).setIdentity();
    W.block<3, 3>(3, 3 * i) = skew(eval.contactPos[closed[i]] - eval.kin.robotCom);
  }
  vector6_t rhs;
  rhs.head<3>() = -tree.totalMass() * model_->settings().gravity - fArm;
  rhs.tail<3>().setZero();
  if (eeContact_ >= 0 && mode[eeContact_]) {
    rhs.tail<3>() -= (eval.contactPos[eeContact_] - eval.kin.robotCom).cross(fArm);
  }
  const vector_t feetForces = W.completeOrthogonalDecomposition().solve(rhs);
  for (std::size_t i = 0; i < closed.size(); ++i) {
    uRef.segment<3>(dims.forceStart(closed[i])) = feetForces.segment<3>(3 * i);
  }
  return uRef;
}

vector_t CentroidalOcp::initialInput(scalar_t t, const vector_t& x, const ContactFlags& mode) const {
  // Least-norm closed-contact forces balancing gravity in force and moment
  // about the CoM; keeps the bootstrap rollout near equilibrium.
  const auto& dims = model_->dims();
  const auto& tree = model_->tree();
  std::vector<int> closed;
  for (int c = 0; c < dims.numContacts; ++c) {
    if (mode[c] && tree.contact(c).type == ContactClass::Foot) {
      closed.push_back(c);
    }
  }
  if (closed.empty()) {
    return inputReference(t, mode);
  }

  const ModelEvaluation eval = model_->evaluate(dims.configuration(x), false);
  vector_t uRef = inputReference(t, mode);
  matrix_t W(6, 3 * closed.size());
  for (std::size_t i = 0; i < closed.size(); ++i) {
    W.block<3, 3>(0, 3 * i).setIdentity();
    W.block<3, 3>(3, 3 * i) = skew(eval.contactPos[closed[i]] - eval.kin.robotCom);
  }
  vector6_t rhs;
  rhs.head<3>() = -tree.totalMass() * model_->settings().gravity;
  rhs.tail<3>().setZero();
  if (eeContact_ >= 0 && mode[eeContact_]) {
    const vector3_t fArm = uRef.segment<3>(dims.forceStart(eeContact_));
    rhs.head<3>() -= fArm;
    rhs.tail<3>() -= (eval.contactPos[eeContact_] - eval.kin.robotCom).cross(fArm);
  }
  const vector_t feetForces = W.completeOrthogonalDecomposition().solve(rhs);
  vector_t u = uRef;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    u.segment<3>(dims.forceStart(closed[i])) = feetForces.segment<3>(3 * i);
  }
  return u;
}

}  // namespace wbmpc
