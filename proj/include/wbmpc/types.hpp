#pragma once

#include <Eigen/Dense>

namespace wbmpc {

using scalar_t = double;
using vector_t = Eigen::VectorXd;
using matrix_t = Eigen::MatrixXd;
using vector3_t = Eigen::Vector3d;
using vector6_t = Eigen::Matrix<double, 6, 1>;
using matrix3_t = Eigen::Matrix3d;
using matrix6_t = Eigen::Matrix<double, 6, 6>;
using quaternion_t = Eigen::Quaterniond;

inline constexpr scalar_t kGravity = 9.81;

}  // namespace wbmpc
