#pragma once

#include <vector>

#include "wbmpc/dynamics/centroidal_model.hpp"

namespace wbmpc {

/// Piecewise-linear reference signal; clamps outside its knot range. An
/// empty trajectory evaluates to a zero vector of the given dimension.
class ReferenceTrajectory {
 public:
  ReferenceTrajectory() = default;
  ReferenceTrajectory(std::vector<scalar_t> times, std::vector<vector_t> values);
  static ReferenceTrajectory constant(vector_t value);

  bool empty() const { return values_.empty(); }
  vector_t at(scalar_t t) const;
  vector_t atOrZero(scalar_t t, int dim) const;

  const std::vector<scalar_t>& times() const { return times_; }
  const std::vector<vector_t>& values() const { return values_; }

 private:
  std::vector<scalar_t> times_;
  std::vector<vector_t> values_;
};

/// Diagonal weights of the tracking cost
///   L = a1 (|r_IE - r_ref|^2_Qeep + |zeta_IE|^2_Qeeo)
///     + a2 |x_r - x_r_ref|^2_Qr + a3 |x_o - x_o_ref|^2_Qo + |u - u_ref|^2_R,
/// with an analogous state-only terminal term.
struct TaskCostWeights {
  bool alpha1 = false;  // end-effector tracking
  bool alpha2 = true;   // robot-state tracking
  bool alpha3 = false;  // object-state tracking
  vector_t robotState;        // 12 + n_a
  vector_t object;            // 2 n_o
  vector3_t eePosition = vector3_t::Zero();
  vector3_t eeOrientation = vector3_t::Zero();
  vector_t input;             // 3 n_c + n_a, strictly positive
  vector_t terminalRobotState;
  vector_t terminalObject;
  vector3_t terminalEePosition = vector3_t::Zero();
  vector3_t terminalEeOrientation = vector3_t::Zero();

  void validate(const SystemDims& dims) const;
};

struct TaskReferences {
  ReferenceTrajectory robotState;     // 12 + n_a
  ReferenceTrajectory object;         // 2 n_o
  ReferenceTrajectory eePosition;     // 3
  ReferenceTrajectory eeOrientation;  // 3, ZYX Euler angles of R_IE^ref
  ReferenceTrajectory armForce;       // 3, feedforward reference of f_arm
};

}  // namespace wbmpc
