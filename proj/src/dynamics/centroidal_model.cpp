#include "wbmpc/dynamics/centroidal_model.hpp"

#include <stdexcept>

#include "wbmpc/rotations.hpp"

namespace wbmpc {

CentroidalModel::CentroidalModel(std::shared_ptr<const KinematicTree> tree,
                                 std::shared_ptr<const ObjectModel> object, Settings settings)
    : tree_(std::move(tree)), object_(std::move(object)), settings_(std::move(settings)) {
  dims_.numJoints = tree_->numJoints();
  dims_.numContacts = tree_->numContacts();
  dims_.objectDim = object_ ? object_->dim() : 0;

  if (settings_.srbd) {
    if (settings_.nominalConfiguration.size() != tree_->numQ()) {
      throw std::invalid_argument("CentroidalModel: SRBD variant needs a nominal configuration");
    }
    nominalCmm_ = centroidalMomentumMatrix(*tree_, forwardKinematics(*tree_, settings_.nominalConfiguration));
  }
}

ModelEvaluation CentroidalModel::evaluate(const vector_t& q, bool withJacobians, bool withArmGravity,
                                          bool checkConditioning) const {
  ModelEvaluation eval;
  eval.kin = forwardKinematics(*tree_, q);
  eval.cmm = settings_.srbd ? *nominalCmm_ : centroidalMomentumMatrix(*tree_, eval.kin);
  eval.baseBlockLu.compute(eval.cmm.baseBlock);
  if (checkConditioning && eval.baseBlockLu.rcond() < 1e-12) {
    throw std::runtime_error("CentroidalModel: singular centroidal base block");
  }
  eval.contactPos.resize(tree_->numContacts());
  for (int c = 0; c < tree_->numContacts(); ++c) {
    eval.contactPos[c] = contactPosition(*tree_, eval.kin, c);
  }
  if (withJacobians) {
    eval.contactJac.resize(tree_->numContacts());
    for (int c = 0; c < tree_->numContacts(); ++c) {
      eval.contactJac[c] = contactJacobian(*tree_, eval.kin, c);
    }
    if (withArmGravity) {
      eval.armGravity = armGravityTorque(*tree_, eval.kin);
    }
    eval.hasJacobians = true;
  }
  return eval;
}

vector6_t CentroidalModel::centroidalRate(const ModelEvaluation& eval, const vector_t& u) const {
  vector6_t hdot;
  hdot.head<3>() = tree_->totalMass() * settings_.gravity;
  hdot.tail<3>().setZero();
  for (int c = 0; c < dims_.numContacts; ++c) {
    const vector3_t f = dims_.contactForce(u, c);
    hdot.head<3>() += f;
    hdot.tail<3>() += (eval.contactPos[c] - eval.kin.robotCom).cross(f);
  }
  return hdot;
}

vector6_t CentroidalModel::baseRate(const ModelEvaluation& eval, const vector_t& x, const vector_t& u) const {
  vector6_t rhs = dims_.momentum(x);
  if (!settings_.srbd) {
    rhs -= eval.cmm.jointBlock * dims_.jointVelocities(u);
  }
  return eval.baseBlockLu.solve(rhs);
}

vector_t CentroidalModel::flow(scalar_t /*t*/, const vector_t& x, const vector_t& u) const {
  checkDimensions(x, u);
  const ModelEvaluation eval = evaluate(dims_.configuration(x), false);
  return flowWithEval(eval, x, u);
}

vector_t CentroidalModel::flowWithEval(const ModelEvaluation& eval, const vector_t& x,
                                       const vector_t& u) const {
  vector_t xdot(dims_.stateDim());
  xdot.segment<6>(0) = centroidalRate(eval, u);
  xdot.segment<6>(6) = baseRate(eval, x, u);
  xdot.segment(12, dims_.numJoints) = dims_.jointVelocities(u);
  if (object_) {
    const int armContact = tree_->armContactIndex();
    const vector3_t fArm = armContact >= 0 ? vector3_t(dims_.contactForce(u, armContact)) : vector3_t::Zero();
    xdot.tail(2 * dims_.objectDim) =
        object_->rate(dims_.objectPosition(x), dims_.objectVelocity(x), fArm);
  }
  return xdot;
}

void CentroidalModel::linearize(scalar_t /*t*/, const vector_t& x, const vector_t& u, matrix_t& A,
                                matrix_t& B) const {
  checkDimensions(x, u);
  const vector_t q = dims_.configuration(x);
  const ModelEvaluation eval = evaluate(q, false);

  std::vector<std::pair<ModelEvaluation, ModelEvaluation>> qPerturbed;
  qPerturbed.reserve(q.size());
  for (int i = 0; i < q.size(); ++i) {
    vector_t qp = q, qm = q;
    qp(i) += kFdStep;
    qm(i) -= kFdStep;
    qPerturbed.emplace_back(evaluate(qp, false), evaluate(qm, false));
  }
  linearizeWithEvals(eval, qPerturbed, kFdStep, x, u, A, B);
}

void CentroidalModel::linearizeWithEvals(
    const ModelEvaluation& eval, const std::vector<std::pair<ModelEvaluation, ModelEvaluation>>& qPerturbed,
    scalar_t qStep, const vector_t& x, const vector_t& u, matrix_t& A, matrix_t& B) const {
  const int nx = dims_.stateDim();
  const int nu = dims_.inputDim();
  const int nq = 6 + dims_.numJoints;
  A = matrix_t::Zero(nx, nx);
  B = matrix_t::Zero(nx, nu);

  // Momentum rows: forces enter linearly, the q-dependence (contact levers
  // and CoM) comes from the perturbed evaluations.
  for (int c = 0; c < dims_.numContacts; ++c) {
    B.block<3, 3>(0, dims_.forceStart(c)).setIdentity();
    B.block<3, 3>(3, dims_.forceStart(c)) = skew(eval.contactPos[c] - eval.kin.robotCom);
  }
  for (int i = 0; i < nq; ++i) {
    const vector6_t dp = centroidalRate(qPerturbed[i].first, u);
    const vector6_t dm = centroidalRate(qPerturbed[i].second, u);
    A.block<6, 1>(0, 6 + i) = (dp - dm) / (2.0 * qStep);
  }

  // Base-rate rows.
  const matrix6_t baseBlockInv = eval.baseBlockLu.solve(matrix6_t::Identity());
  A.block<6, 6>(6, 0) = baseBlockInv;
  if (!settings_.srbd) {
    B.block(6, dims_.jointVelStart(), 6, dims_.numJoints) = -baseBlockInv * eval.cmm.jointBlock;
    for (int i = 0; i < nq; ++i) {
      const vector6_t dp = baseRate(qPerturbed[i].first, x, u);
      const vector6_t dm = baseRate(qPerturbed[i].second, x, u);
      A.block<6, 1>(6, 6 + i) = (dp - dm) / (2.0 * qStep);
    }
  }

  // Joint integrator rows.
  B.block(12, dims_.jointVelStart(), dims_.numJoints, dims_.numJoints).setIdentity();

  // Object rows.
  if (object_) {
    const int no = dims_.objectDim;
    const int os = dims_.objectStart();
    const vector_t qo = dims_.objectPosition(x);
    const vector_t vo = dims_.objectVelocity(x);
    const int armContact = tree_->armContactIndex();
    const vector3_t fArm = armContact >= 0 ? vector3_t(dims_.contactForce(u, armContact)) : vector3_t::Zero();

    A.block(os, os + no, no, no).setIdentity();
    const auto Minv = object_->inertia().ldlt();
    A.block(os + no, os, no, no) =
        Minv.solve(-(object_->graspJacobianTransposeForceJacobian(qo, fArm) + object_->biasJacobianQ(qo, vo)));
    A.block(os + no, os + no, no, no) = Minv.solve(-object_->biasJacobianV(qo, vo));
    if (armContact >= 0) {
      B.block(os + no, dims_.forceStart(armContact), no, 3) =
          Minv.solve(-object_->graspJacobian(qo).transpose());
    }
  }
}

void CentroidalModel::checkDimensions(const vector_t& x, const vector_t& u) const {
  if (x.size() != dims_.stateDim() || u.size() != dims_.inputDim()) {
    throw std::invalid_argument("CentroidalModel: state/input dimension mismatch (expected " +
                                std::to_string(dims_.stateDim()) + "/" + std::to_string(dims_.inputDim()) +
                                ", got " + std::to_string(x.size()) + "/" + std::to_string(u.size()) + ")");
  }
}

void linearizeFlowFd(const CentroidalModel& model, scalar_t t, const vector_t& x, const vector_t& u,
                     matrix_t& A, matrix_t& B, scalar_t eps) {
  const int nx = x.size();
  const int nu = u.size();
  A.resize(nx, nx);
  B.resize(nx, nu);
  for (int i = 0; i < nx; ++i) {
    const scalar_t h = eps * std::max(1.0, std::abs(x(i)));
    vector_t xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    A.col(i) = (model.flow(t, xp, u) - model.flow(t, xm, u)) / (2.0 * h);
  }
  for (int i = 0; i < nu; ++i) {
    const scalar_t h = eps * std::max(1.0, std::abs(u(i)));
    vector_t up = u, um = u;
    up(i) += h;
    um(i) -= h;
    B.col(i) = (model.flow(t, x, up) - model.flow(t, x, um)) / (2.0 * h);
  }
}

}  // namespace wbmpc
