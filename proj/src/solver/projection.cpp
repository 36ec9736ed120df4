#include "wbmpc/solver/projection.hpp"

#include <Eigen/QR>

namespace wbmpc {

EqualityProjection projectEqualities(const matrix_t& C, const matrix_t& D, const vector_t& e,
                                     scalar_t rankTolerance, const std::string& context) {
  const int m = static_cast<int>(D.rows());
  const int nu = static_cast<int>(D.cols());
  const int nx = static_cast<int>(C.cols());

  EqualityProjection proj;
  if (m == 0) {
    proj.particular = vector_t::Zero(nu);
    proj.stateGain = matrix_t::Zero(nu, nx);
    proj.nullspace = matrix_t::Identity(nu, nu);
    return proj;
  }

  // Column-pivoted QR of D^T: D^T P = Q [R; 0]. The leading columns of Q
  // span range(D^T), the trailing ones span ker(D); pinv(D) = Q_1 R^{-T} P^T.
  Eigen::ColPivHouseholderQR<matrix_t> qr(D.transpose());
  if (m > nu || std::abs(qr.matrixR()(m - 1, m - 1)) < rankTolerance) {
    throw ConstraintRankError("equality constraint input Jacobian is rank deficient (" +
                              std::to_string(m) + " rows, " + std::to_string(nu) + " inputs)" +
                              (context.empty() ? "" : " at " + context));
  }
  const matrix_t Q = qr.householderQ() * matrix_t::Identity(nu, nu);
  const matrix_t R = qr.matrixR().topRows(m).triangularView<Eigen::Upper>();

  const matrix_t pinvD = Q.leftCols(m) *
                         R.transpose().triangularView<Eigen::Lower>().solve(matrix_t::Identity(m, m)) *
                         qr.colsPermutation().transpose();
  proj.particular = -pinvD * e;
  proj.stateGain = -pinvD * C;
  proj.nullspace = Q.rightCols(nu - m);
  proj.rank = m;
  return proj;
}

}  // namespace wbmpc
