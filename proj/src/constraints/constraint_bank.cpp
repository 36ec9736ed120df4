#include "wbmpc/constraints/constraint_bank.hpp"

#include <cmath>
#include <stdexcept>

namespace wbmpc {

ConstraintBank::ConstraintBank(std::shared_ptr<const CentroidalModel> model,
                               std::shared_ptr<const SwingReferenceProvider> swing, Limits limits)
    : model_(std::move(model)), swing_(std::move(swing)), limits_(limits) {
  if (!swing_) {
    swing_ = std::make_shared<ZeroSwingReference>();
  }
  if (!(limits_.frictionCoefficient > 0.0) || !(limits_.coneEpsilon > 0.0)) {
    throw std::invalid_argument("ConstraintBank: mu_s and cone epsilon must be positive");
  }
}

vector_t ConstraintBank::generalizedVelocity(const vector_t& x, const vector_t& u,
                                             const ModelEvaluation& eval) const {
  const auto& dims = model_->dims();
  vector_t qdot(6 + dims.numJoints);
  qdot.head<6>() = model_->baseRate(eval, x, u);
  qdot.tail(dims.numJoints) = dims.jointVelocities(u);
  return qdot;
}

vector3_t ConstraintBank::contactVelocity(int contact, const vector_t& x, const vector_t& u,
                                          const ModelEvaluation& eval) const {
  return eval.contactJac[contact] * generalizedVelocity(x, u, eval);
}

vector_t ConstraintBank::torqueEstimate(const vector_t& u, const ModelEvaluation& eval) const {
  const auto& dims = model_->dims();
  const auto& tree = model_->tree();
  const int armContact = tree.armContactIndex();
  const auto& armJoints = tree.armJoints();
  const vector3_t fArm = dims.contactForce(u, armContact);
  vector_t tau = eval.armGravity;
  for (std::size_t a = 0; a < armJoints.size(); ++a) {
    tau(a) -= eval.contactJac[armContact].col(6 + armJoints[a]).dot(fArm);
  }
  return tau;
}

std::vector<EqualityBlock> ConstraintBank::equalityResiduals(scalar_t t, const vector_t& x,
                                                             const vector_t& u, const ContactFlags& mode,
                                                             const ModelEvaluation& eval) const {
  const auto& dims = model_->dims();
  const auto& tree = model_->tree();
  if (static_cast<int>(mode.size()) != dims.numContacts) {
    throw std::invalid_argument("ConstraintBank: mode size mismatch");
  }

  std::vector<EqualityBlock> blocks;
  for (int c = 0; c < dims.numContacts; ++c) {
    const bool closed = mode[c];
    const bool isFoot = tree.contact(c).type == ContactClass::Foot;
    const std::string& name = tree.contact(c).name;

    if (closed && isFoot) {
      EqualityBlock b;
      b.label = name + "/velocity";
      b.residual = contactVelocity(c, x, u, eval);
      blocks.push_back(std::move(b));
    } else if (!closed && isFoot) {
      EqualityBlock swing;
      swing.label = name + "/swing";
      swing.residual = vector_t::Constant(
          1, swing_->normal(c).dot(contactVelocity(c, x, u, eval)) - swing_->normalVelocity(c, t));
      blocks.push_back(std::move(swing));
    } else if (closed && !isFoot) {
      if (model_->object() == nullptr) {
        throw std::invalid_argument("ConstraintBank: arm contact closed but no object model declared");
      }
      EqualityBlock b;
      b.label = name + "/grasp";
      b.residual = contactVelocity(c, x, u, eval) -
                   model_->object()->graspJacobian(dims.objectPosition(x)) * dims.objectVelocity(x);
      blocks.push_back(std::move(b));
    }
    if (!closed) {
      EqualityBlock f;
      f.label = name + "/force";
      f.residual = dims.contactForce(u, c);
      blocks.push_back(std::move(f));
    }
  }
  return blocks;
}

std::vector<InequalityBlock> ConstraintBank::inequalityResiduals(const vector_t& x, const vector_t& u,
                                                                 const ContactFlags& mode,
                                                                 const ModelEvaluation& eval) const {
  const auto& dims = model_->dims();
  const auto& tree = model_->tree();
  const auto& armJoints = tree.armJoints();
  const int nArm = static_cast<int>(armJoints.size());
  std::vector<InequalityBlock> blocks;

  if (nArm > 0) {
    InequalityBlock vel;
    vel.label = "arm/velocity_limits";
    vel.kind = InequalityLabel::VelocityLimit;
    vel.residual.resize(2 * nArm);
    const vector_t vj = dims.jointVelocities(u);
    for (int a = 0; a < nArm; ++a) {
      const scalar_t vmax = tree.jointLimit(armJoints[a]).velocityMax;
      vel.residual(2 * a) = vmax - vj(armJoints[a]);
      vel.residual(2 * a + 1) = vmax + vj(armJoints[a]);
    }
    blocks.push_back(std::move(vel));
  }

  const int armContact = tree.armContactIndex();
  if (armContact >= 0 && mode[armContact] && nArm > 0) {
    InequalityBlock torque;
    torque.label = "arm/torque_limits";
    torque.kind = InequalityLabel::TorqueLimit;
    torque.residual.resize(2 * nArm);
    const vector_t tau = torqueEstimate(u, eval);
    for (int a = 0; a < nArm; ++a) {
      const scalar_t tmax = tree.jointLimit(armJoints[a]).torqueMax;
      torque.residual(2 * a) = tmax - tau(a);
      torque.residual(2 * a + 1) = tmax + tau(a);
    }
    blocks.push_back(std::move(torque));
  }

  for (int c = 0; c < dims.numContacts; ++c) {
    if (!mode[c] || tree.contact(c).type != ContactClass::Foot) {
      continue;
    }
    const vector3_t f = dims.contactForce(u, c);
    InequalityBlock cone;
    cone.label = tree.contact(c).name + "/friction_cone";
    cone.kind = InequalityLabel::FrictionCone;
    cone.residual = vector_t::Constant(
        1, limits_.frictionCoefficient * f.z() -
               std::sqrt(f.x() * f.x() + f.y() * f.y() + limits_.coneEpsilon * limits_.coneEpsilon));
    blocks.push_back(std::move(cone));
  }
  return blocks;
}

std::vector<EqualityBlock> ConstraintBank::equalities(
    scalar_t t, const vector_t& x, const vector_t& u, const ContactFlags& mode, const ModelEvaluation& eval,
    const std::vector<std::pair<ModelEvaluation, ModelEvaluation>>& qPerturbed, scalar_t qStep) const {
  const auto& dims = model_->dims();
  const auto& tree = model_->tree();
  const int nx = dims.stateDim();
  const int nu = dims.inputDim();
  const int nq = 6 + dims.numJoints;

  auto blocks = equalityResiduals(t, x, u, mode, eval);

  // Closed-form input/momentum blocks of the contact-velocity map; the
  // generalized velocities at the perturbed evaluations are shared across
  // every contact row.
  const matrix6_t baseBlockInv = eval.baseBlockLu.solve(matrix6_t::Identity());
  const bool srbd = model_->settings().srbd;
  std::vector<std::pair<vector_t, vector_t>> qdotPerturbed(nq);
  for (int i = 0; i < nq; ++i) {
    qdotPerturbed[i] = {generalizedVelocity(x, u, qPerturbed[i].first),
                        generalizedVelocity(x, u, qPerturbed[i].second)};
  }

  std::size_t idx = 0;
  for (int c = 0; c < dims.numContacts; ++c) {
    const bool closed = mode[c];
    const bool isFoot = tree.contact(c).type == ContactClass::Foot;
    const bool velocityLike = (closed && isFoot) || (!closed && isFoot) || (closed && !isFoot);

    if (velocityLike) {
      EqualityBlock& b = blocks[idx++];
      const matrix_t& J = eval.contactJac[c];
      matrix_t dvdx = matrix_t::Zero(3, nx);
      matrix_t dvdu = matrix_t::Zero(3, nu);
      dvdx.leftCols<6>() = J.leftCols<6>() * baseBlockInv;
      dvdu.rightCols(dims.numJoints) = J.rightCols(dims.numJoints);
      if (!srbd) {
        dvdu.rightCols(dims.numJoints) -= J.leftCols<6>() * baseBlockInv * eval.cmm.jointBlock;
      }
      for (int i = 0; i < nq; ++i) {
        const vector3_t vp = qPerturbed[i].first.contactJac[c] * qdotPerturbed[i].first;
        const vector3_t vm = qPerturbed[i].second.contactJac[c] * qdotPerturbed[i].second;
        dvdx.col(6 + i) = (vp - vm) / (2.0 * qStep);
      }

      if (closed && isFoot) {
        b.dgdx = dvdx;
        b.dgdu = dvdu;
      } else if (!closed && isFoot) {
        b.dgdx = swing_->normal(c).transpose() * dvdx;
        b.dgdu = swing_->normal(c).transpose() * dvdu;
      } else {
        // Grasp rows additionally depend on the object state.
        const vector_t qo = dims.objectPosition(x);
        const vector_t vo = dims.objectVelocity(x);
        b.dgdx = dvdx;
        b.dgdu = dvdu;
        b.dgdx.middleCols(dims.objectStart(), dims.objectDim) =
            -model_->object()->graspJacobianVelocityDerivative(qo, vo);
        b.dgdx.middleCols(dims.objectStart() + dims.objectDim, dims.objectDim) =
            -model_->object()->graspJacobian(qo);
      }
    }
    if (!closed) {
      EqualityBlock& b = blocks[idx++];
      b.dgdx = matrix_t::Zero(3, nx);
      b.dgdu = matrix_t::Zero(3, nu);
      b.dgdu.middleCols<3>(dims.forceStart(c)).setIdentity();
    }
  }
  return blocks;
}

std::vector<InequalityBlock> ConstraintBank::inequalities(
    const vector_t& x, const vector_t& u, const ContactFlags& mode, const ModelEvaluation& eval,
    const std::vector<std::pair<ModelEvaluation, ModelEvaluation>>& qPerturbed, scalar_t qStep) const {
  const auto& dims = model_->dims();
  const auto& tree = model_->tree();
  const auto& armJoints = tree.armJoints();
  const int nArm = static_cast<int>(armJoints.size());
  const int nx = dims.stateDim();
  const int nu = dims.inputDim();
  const int nq = 6 + dims.numJoints;

  auto blocks = inequalityResiduals(x, u, mode, eval);
  std::size_t idx = 0;

  if (nArm > 0) {
    InequalityBlock& vel = blocks[idx++];
    vel.dhdx = matrix_t::Zero(2 * nArm, nx);
    vel.dhdu = matrix_t::Zero(2 * nArm, nu);
    for (int a = 0; a < nArm; ++a) {
      vel.dhdu(2 * a, dims.jointVelStart() + armJoints[a]) = -1.0;
      vel.dhdu(2 * a + 1, dims.jointVelStart() + armJoints[a]) = 1.0;
    }
  }

  const int armContact = tree.armContactIndex();
  if (armContact >= 0 && mode[armContact] && nArm > 0) {
    InequalityBlock& torque = blocks[idx++];
    torque.dhdx = matrix_t::Zero(2 * nArm, nx);
    torque.dhdu = matrix_t::Zero(2 * nArm, nu);
    // Force block: d tau / d f_arm = -J_arm^T.
    for (int a = 0; a < nArm; ++a) {
      const vector3_t col = eval.contactJac[armContact].col(6 + armJoints[a]);
      torque.dhdu.block<1, 3>(2 * a, dims.forceStart(armContact)) = col.transpose();
      torque.dhdu.block<1, 3>(2 * a + 1, dims.forceStart(armContact)) = -col.transpose();
    }
    for (int i = 0; i < nq; ++i) {
      const vector_t tp = torqueEstimate(u, qPerturbed[i].first);
      const vector_t tm = torqueEstimate(u, qPerturbed[i].second);
      const vector_t d = (tp - tm) / (2.0 * qStep);
      for (int a = 0; a < nArm; ++a) {
        torque.dhdx(2 * a, 6 + i) = -d(a);
        torque.dhdx(2 * a + 1, 6 + i) = d(a);
      }
    }
  }

  for (int c = 0; c < dims.numContacts; ++c) {
    if (!mode[c] || tree.contact(c).type != ContactClass::Foot) {
      continue;
    }
    InequalityBlock& cone = blocks[idx++];
    const vector3_t f = dims.contactForce(u, c);
    const scalar_t s =
        std::sqrt(f.x() * f.x() + f.y() * f.y() + limits_.coneEpsilon * limits_.coneEpsilon);
    cone.dhdx = matrix_t::Zero(1, nx);
    cone.dhdu = matrix_t::Zero(1, nu);
    cone.dhdu(0, dims.forceStart(c) + 0) = -f.x() / s;
    cone.dhdu(0, dims.forceStart(c) + 1) = -f.y() / s;
    cone.dhdu(0, dims.forceStart(c) + 2) = limits_.frictionCoefficient;
  }
  return blocks;
}

std::vector<EqualityBlock> ConstraintBank::equalities(scalar_t t, const vector_t& x, const vector_t& u,
                                                      const ContactFlags& mode) const {
  const vector_t q = model_->dims().configuration(x);
  const ModelEvaluation eval = model_->evaluate(q, true);
  std::vector<std::pair<ModelEvaluation, ModelEvaluation>> qPerturbed;
  qPerturbed.reserve(q.size());
  for (int i = 0; i < q.size(); ++i) {
    vector_t qp = q, qm = q;
    qp(i) += CentroidalModel::kFdStep;
    qm(i) -= CentroidalModel::kFdStep;
    qPerturbed.emplace_back(model_->evaluate(qp, true), model_->evaluate(qm, true));
  }
  return equalities(t, x, u, mode, eval, qPerturbed, CentroidalModel::kFdStep);
}

std::vector<InequalityBlock> ConstraintBank::inequalities(const vector_t& x, const vector_t& u,
                                                          const ContactFlags& mode) const {
  const vector_t q = model_->dims().configuration(x);
  const ModelEvaluation eval = model_->evaluate(q, true);
  std::vector<std::pair<ModelEvaluation, ModelEvaluation>> qPerturbed;
  qPerturbed.reserve(q.size());
  for (int i = 0; i < q.size(); ++i) {
    vector_t qp = q, qm = q;
    qp(i) += CentroidalModel::kFdStep;
    qm(i) -= CentroidalModel::kFdStep;
    qPerturbed.emplace_back(model_->evaluate(qp, true), model_->evaluate(qm, true));
  }
  return inequalities(x, u, mode, eval, qPerturbed, CentroidalModel::kFdStep);
}

scalar_t ConstraintBank::maxEqualityViolation(scalar_t t, const vector_t& x, const vector_t& u,
                                              const ContactFlags& mode) const {
  const ModelEvaluation eval = model_->evaluate(model_->dims().configuration(x), true);
  scalar_t worst = 0.0;
  for (const auto& b : equalityResiduals(t, x, u, mode, eval)) {
    worst = std::max(worst, b.residual.cwiseAbs().maxCoeff());
  }
  return worst;
}

scalar_t ConstraintBank::maxInequalityViolation(const vector_t& x, const vector_t& u,
                                                const ContactFlags& mode) const {
  const ModelEvaluation eval = model_->evaluate(model_->dims().configuration(x), true);
  scalar_t worst = 0.0;
  for (const auto& b : inequalityResiduals(x, u, mode, eval)) {
    worst = std::max(worst, std::max(0.0, -b.residual.minCoeff()));
  }
  return worst;
}

int ConstraintBank::equalityRowCount(const ContactFlags& mode) const {
  const auto& tree = model_->tree();
  int rows = 0;
  for (int c = 0; c < model_->dims().numContacts; ++c) {
    const bool isFoot = tree.contact(c).type == ContactClass::Foot;
    if (mode[c]) {
      rows += 3;  // closed foot velocity or closed arm grasp
    } else {
      rows += isFoot ? 4 : 3;  // swing row + force rows / force rows
    }
  }
  return rows;
}

int ConstraintBank::inequalityRowCount(const ContactFlags& mode) const {
  const auto& tree = model_->tree();
  const int nArm = tree.numArmJoints();
  int rows = 2 * nArm;
  const int armContact = tree.armContactIndex();
  if (armContact >= 0 && mode[armContact]) {
    rows += 2 * nArm;
  }
  for (int c = 0; c < model_->dims().numContacts; ++c) {
    if (mode[c] && tree.contact(c).type == ContactClass::Foot) {
      rows += 1;
    }
  }
  return rows;
}

}  // namespace wbmpc
