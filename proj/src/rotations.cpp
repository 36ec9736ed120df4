#include "wbmpc/rotations.hpp"

#include <cmath>

namespace wbmpc {

matrix3_t skew(const vector3_t& v) {
  matrix3_t s;
  s << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return s;
}

matrix3_t rotationFromEulerZyx(const vector3_t& eulerZyx) {
  const scalar_t cr = std::cos(eulerZyx(0)), sr = std::sin(eulerZyx(0));
  const scalar_t cp = std::cos(eulerZyx(1)), sp = std::sin(eulerZyx(1));
  const scalar_t cy = std::cos(eulerZyx(2)), sy = std::sin(eulerZyx(2));
  matrix3_t R;
  R << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,  //
      sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,   //
      -sp, cp * sr, cp * cr;
  return R;
}

matrix3_t eulerRateToAngularVelocityMap(const vector3_t& eulerZyx) {
  // Columns are the world-frame axes picked up by each Euler rate:
  // omega = rolldot * Rz*Ry*ex + pitchdot * Rz*ey + yawdot * ez.
  const scalar_t cp = std::cos(eulerZyx(1)), sp = std::sin(eulerZyx(1));
  const scalar_t cy = std::cos(eulerZyx(2)), sy = std::sin(eulerZyx(2));
  matrix3_t T;
  T << cy * cp, -sy, 0.0,  //
      sy * cp, cy, 0.0,    //
      -sp, 0.0, 1.0;
  return T;
}

matrix3_t eulerRateMapDerivative(const vector3_t& eulerZyx, const vector3_t& eulerRates) {
  const scalar_t cp = std::cos(eulerZyx(1)), sp = std::sin(eulerZyx(1));
  const scalar_t cy = std::cos(eulerZyx(2)), sy = std::sin(eulerZyx(2));
  const scalar_t dp = eulerRates(1), dy = eulerRates(2);
  matrix3_t dT;
  dT << -sy * dy * cp - cy * sp * dp, -cy * dy, 0.0,  //
      cy * dy * cp - sy * sp * dp, -sy * dy, 0.0,     //
      -cp * dp, 0.0, 0.0;
  return dT;
}

vector3_t rotationLog(const matrix3_t& R) {
  const scalar_t traceR = R.trace();
  const scalar_t c = std::clamp((traceR - 1.0) / 2.0, -1.0, 1.0);
  const scalar_t angle = std::acos(c);
  if (angle < 1e-10) {
    // First-order expansion around identity.
    return 0.5 * vector3_t(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  }
  if (angle > M_PI - 1e-6) {
    // Near pi: extract the axis from the symmetric part.
    matrix3_t S = 0.5 * (R + matrix3_t::Identity());
    vector3_t axis;
    int k;
    S.diagonal().maxCoeff(&k);
    axis = S.col(k) / std::sqrt(S(k, k));
    axis.normalize();
    // Fix sign using the skew part.
    const vector3_t w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
    if (axis.dot(w) < 0.0) {
      axis = -axis;
    }
    return angle * axis;
  }
  const scalar_t s = std::sin(angle);
  return (angle / (2.0 * s)) * vector3_t(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
}

matrix3_t rotationExp(const vector3_t& w) {
  const scalar_t angle = w.norm();
  if (angle < 1e-12) {
    return matrix3_t::Identity() + skew(w);
  }
  const vector3_t axis = w / angle;
  const matrix3_t K = skew(axis);
  return matrix3_t::Identity() + std::sin(angle) * K + (1.0 - std::cos(angle)) * K * K;
}

bool nearPitchSingularity(const vector3_t& eulerZyx, scalar_t guard) {
  return std::abs(eulerZyx(1)) > (M_PI / 2.0 - guard);
}

}  // namespace wbmpc
