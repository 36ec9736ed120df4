#pragma once

#include <memory>

#include "wbmpc/types.hpp"

namespace wbmpc {

/// Dynamics of a manipulated environment object with generalized coordinates
/// q_o, v_o:
///
///   vdot_o = M_o^{-1} (-J_co^T f_arm - b_o(q_o, v_o)),
///
/// where f_arm is the contact force applied by the object on the robot's
/// end-effector and b_o = damping * v_o + spring * q_o + constant collects the
/// position/velocity-dependent generalized forces. J_co maps object velocity
/// to the world velocity of the grasp point.
class ObjectModel {
 public:
  virtual ~ObjectModel() = default;

  virtual int dim() const = 0;                                   // n_o
  virtual const matrix_t& inertia() const = 0;                   // M_o, SPD
  virtual vector_t bias(const vector_t& qo, const vector_t& vo) const = 0;
  virtual matrix_t biasJacobianQ(const vector_t& qo, const vector_t& vo) const = 0;
  virtual matrix_t biasJacobianV(const vector_t& qo, const vector_t& vo) const = 0;

  /// 3 x n_o grasp Jacobian at object position q_o.
  virtual matrix_t graspJacobian(const vector_t& qo) const = 0;
  /// Derivative of graspJacobian^T * f with respect to q_o (n_o x n_o).
  virtual matrix_t graspJacobianTransposeForceJacobian(const vector_t& qo, const vector3_t& f) const = 0;
  /// Derivative of graspJacobian * v_o with respect to q_o (3 x n_o).
  virtual matrix_t graspJacobianVelocityDerivative(const vector_t& qo, const vector_t& vo) const = 0;

  /// World position of the grasp point (handle) at q_o.
  virtual vector3_t handlePosition(const vector_t& qo) const = 0;

  vector_t rate(const vector_t& qo, const vector_t& vo, const vector3_t& fArm) const;
};

/// Door on a hinge: rotational mass-damper with a constant recoil torque
/// that drives the angle back toward zero (closed).
struct DoorParams {
  scalar_t inertia = 10.0;      // kg m^2
  scalar_t damping = 5.0;       // N m s
  scalar_t spring = 0.0;        // N m / rad
  scalar_t recoilTorque = 5.0;  // N m, resists opening
  vector3_t hingePosition = vector3_t::Zero();
  vector3_t hingeAxis = vector3_t::UnitZ();
  vector3_t handleOffset = vector3_t(0.5, 0.0, 0.0);  // hinge->handle at q_o = 0
};
std::unique_ptr<ObjectModel> makeDoorModel(const DoorParams& params);

/// Point mass sliding along a fixed direction (lifting, throwing, dragging,
/// pushing). Gravity along the direction is folded into the constant bias.
struct PointMassParams {
  scalar_t mass = 5.0;                              // kg
  vector3_t direction = vector3_t::UnitZ();         // unit motion direction
  scalar_t damping = 0.0;                           // N s / m, e.g. drag friction
  scalar_t spring = 0.0;
  vector3_t startPosition = vector3_t::Zero();      // grasp point at q_o = 0
  bool gravityLoaded = true;                        // include m g along -z
};
std::unique_ptr<ObjectModel> makePointMassModel(const PointMassParams& params);

}  // namespace wbmpc
