#pragma once

#include <stdexcept>

#include "wbmpc/types.hpp"

namespace wbmpc {

struct ConstraintRankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input-space decomposition of the linearized state-input equality
/// constraint C dx + D du + e = 0:
///
///   du = particular + stateGain * dx + nullspace * duTilde,
///
/// with particular = -pinv(D) e, stateGain = -pinv(D) C, and `nullspace` an
/// orthonormal basis of ker(D). Any duTilde keeps the constraint satisfied to
/// machine precision.
struct EqualityProjection {
  vector_t particular;   // nu
  matrix_t stateGain;    // nu x nx
  matrix_t nullspace;    // nu x (nu - m)
  int rank = 0;
};

/// Builds the projection. Throws ConstraintRankError when D is row-rank
/// deficient beyond `rankTolerance` (message carries `context`).
EqualityProjection projectEqualities(const matrix_t& C, const matrix_t& D, const vector_t& e,
                                     scalar_t rankTolerance = 1e-8, const std::string& context = "");

}  // namespace wbmpc
