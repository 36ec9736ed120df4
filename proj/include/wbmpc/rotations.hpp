#pragma once

#include "wbmpc/types.hpp"

namespace wbmpc {

/// Skew-symmetric matrix such that skew(a) * b = a x b.
matrix3_t skew(const vector3_t& v);

/// World-to-body rotation from (roll, pitch, yaw): R = Rz(yaw) * Ry(pitch) * Rx(roll).
///
/// The Euler angles follow the ZYX composition but are stored in (x, y, z)
/// component order, so eulerZyx = (roll, pitch, yaw).
matrix3_t rotationFromEulerZyx(const vector3_t& eulerZyx);

/// Mapping T such that omega_world = T(eulerZyx) * eulerRates. T(0) = I.
matrix3_t eulerRateToAngularVelocityMap(const vector3_t& eulerZyx);

/// Time derivative of eulerRateToAngularVelocityMap along (eulerZyx, eulerRates).
matrix3_t eulerRateMapDerivative(const vector3_t& eulerZyx, const vector3_t& eulerRates);

/// Rotation logarithm: exponential coordinates of R (angle * axis).
vector3_t rotationLog(const matrix3_t& R);

/// Rotation exponential of a rotation vector.
matrix3_t rotationExp(const vector3_t& w);

/// True when |pitch| is within (pi/2 - guard) of the ZYX chart singularity.
bool nearPitchSingularity(const vector3_t& eulerZyx, scalar_t guard);

}  // namespace wbmpc
