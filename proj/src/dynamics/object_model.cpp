#include "wbmpc/dynamics/object_model.hpp"

#include <stdexcept>

#include "wbmpc/rotations.hpp"

namespace wbmpc {

vector_t ObjectModel::rate(const vector_t& qo, const vector_t& vo, const vector3_t& fArm) const {
  vector_t xdot(2 * dim());
  xdot.head(dim()) = vo;
  xdot.tail(dim()) =
      inertia().ldlt().solve(-graspJacobian(qo).transpose() * fArm - bias(qo, vo));
  return xdot;
}

namespace {

class DoorModel final : public ObjectModel {
 public:
  explicit DoorModel(const DoorParams& p) : p_(p), M_(matrix_t::Constant(1, 1, p.inertia)) {
    if (!(p_.inertia > 0.0)) {
      throw std::invalid_argument("DoorModel: inertia must be positive");
    }
    if (std::abs(p_.hingeAxis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("DoorModel: hinge axis must be unit length");
    }
  }

  int dim() const override { return 1; }
  const matrix_t& inertia() const override { return M_; }

  vector_t bias(const vector_t& qo, const vector_t& vo) const override {
    return vector_t::Constant(1, p_.damping * vo(0) + p_.spring * qo(0) + p_.recoilTorque);
  }
  matrix_t biasJacobianQ(const vector_t&, const vector_t&) const override {
    return matrix_t::Constant(1, 1, p_.spring);
  }
  matrix_t biasJacobianV(const vector_t&, const vector_t&) const override {
    return matrix_t::Constant(1, 1, p_.damping);
  }

  vector3_t handlePosition(const vector_t& qo) const override {
    return p_.hingePosition + rotationExp(qo(0) * p_.hingeAxis) * p_.handleOffset;
  }

  matrix_t graspJacobian(const vector_t& qo) const override {
    // Lever arm from the hinge axis to the handle point.
    return p_.hingeAxis.cross(handlePosition(qo) - p_.hingePosition);
  }

  matrix_t graspJacobianTransposeForceJacobian(const vector_t& qo, const vector3_t& f) const override {
    // d/dq [ (axis x r(q))^T f ] with dr/dq = axis x r.
    const vector3_t r = handlePosition(qo) - p_.hingePosition;
    const vector3_t drdq = p_.hingeAxis.cross(r);
    return matrix_t::Constant(1, 1, p_.hingeAxis.cross(drdq).dot(f));
  }

  matrix_t graspJacobianVelocityDerivative(const vector_t& qo, const vector_t& vo) const override {
    const vector3_t r = handlePosition(qo) - p_.hingePosition;
    return vector3_t(p_.hingeAxis.cross(p_.hingeAxis.cross(r)) * vo(0));
  }

 private:
  DoorParams p_;
  matrix_t M_;
};

class PointMassModel final : public ObjectModel {
 public:
  explicit PointMassModel(const PointMassParams& p) : p_(p), M_(matrix_t::Constant(1, 1, p.mass)) {
    if (!(p_.mass > 0.0)) {
      throw std::invalid_argument("PointMassModel: mass must be positive");
    }
    if (std::abs(p_.direction.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("PointMassModel: direction must be unit length");
    }
    constantBias_ = p_.gravityLoaded ? p_.mass * kGravity * p_.direction.z() : 0.0;
  }

  int dim() const override { return 1; }
  const matrix_t& inertia() const override { return M_; }

  vector_t bias(const vector_t& qo, const vector_t& vo) const override {
    return vector_t::Constant(1, p_.damping * vo(0) + p_.spring * qo(0) + constantBias_);
  }
  matrix_t biasJacobianQ(const vector_t&, const vector_t&) const override {
    return matrix_t::Constant(1, 1, p_.spring);
  }
  matrix_t biasJacobianV(const vector_t&, const vector_t&) const override {
    return matrix_t::Constant(1, 1, p_.damping);
  }

  vector3_t handlePosition(const vector_t& qo) const override {
    return p_.startPosition + qo(0) * p_.direction;
  }

  matrix_t graspJacobian(const vector_t&) const override { return p_.direction; }

  matrix_t graspJacobianTransposeForceJacobian(const vector_t&, const vector3_t&) const override {
    return matrix_t::Zero(1, 1);
  }

  matrix_t graspJacobianVelocityDerivative(const vector_t&, const vector_t&) const override {
    return matrix_t::Zero(3, 1);
  }

 private:
  PointMassParams p_;
  matrix_t M_;
  scalar_t constantBias_ = 0.0;
};

}  // namespace

std::unique_ptr<ObjectModel> makeDoorModel(const DoorParams& params) {
  return std::make_unique<DoorModel>(params);
}

std::unique_ptr<ObjectModel> makePointMassModel(const PointMassParams& params) {
  return std::make_unique<PointMassModel>(params);
}

}  // namespace wbmpc
