#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wbmpc/ocp/problem.hpp"
#include "wbmpc/solver/projection.hpp"

namespace wbmpc {

/// Settings of the constrained SLQ solver and its augmented-Lagrangian outer
/// loop.
struct AlSettings {
  // Augmented Lagrangian.
  scalar_t initialPenalty = 10.0;       // rho_0
  scalar_t penaltyGrowth = 5.0;         // applied when the violation fails to shrink 4x
  scalar_t maxPenalty = 1e4;            // growth cap; multipliers do the rest
  int maxOuterIterations = 8;
  scalar_t violationTolerance = 1e-3;
  scalar_t equalityTolerance = 1e-3;  // nonlinear residual required for convergence

  // Inner equality-constrained SLQ loop.
  int maxInnerIterations = 50;
  scalar_t innerTolerance = 1e-4;       // relative merit decrease
  scalar_t feedforwardTolerance = 1e-9;

  // Armijo backtracking line search.
  scalar_t armijoFactor = 1e-4;
  scalar_t stepShrink = 0.5;
  scalar_t minStepSize = 1.0 / 1024.0;

  // Levenberg-style regularization of the control Hessian.
  scalar_t initialRegularization = 0.0;
  scalar_t regularizationGrowth = 10.0;
  scalar_t maxRegularization = 1e9;

  // Quadratic penalty stabilizing the projected equalities in the merit;
  // grown when the line search stalls while equality-infeasible.
  scalar_t equalityPenalty = 100.0;
  scalar_t maxEqualityPenalty = 1e8;

  scalar_t constraintRankTolerance = 1e-8;
  scalar_t divergenceThreshold = 1e7;

  // When set, every LQ node is checked against the finite-difference oracle
  // and the worst relative error is reported.
  bool verifyDerivatives = false;
};

struct ConvergenceReport {
  bool converged = false;
  int outerIterations = 0;
  int innerIterations = 0;
  scalar_t cost = 0.0;                    // task cost without penalty terms
  scalar_t meritValue = 0.0;              // AL merit at the solution
  scalar_t maxEqualityResidual = 0.0;     // nonlinear, at the nodes
  scalar_t maxInequalityViolation = 0.0;  // nonlinear, at the nodes
  scalar_t penalty = 0.0;                 // final rho
  scalar_t maxDerivativeError = 0.0;      // verification mode only
  scalar_t solveTimeMs = 0.0;
  std::string failure;                    // empty on success
  std::vector<scalar_t> meritHistory;     // merit after each accepted step
  std::vector<scalar_t> violationHistory;  // max inequality violation per outer iteration
};

/// Time-indexed solution: nominal trajectories, the affine policy
/// u(k, x) = u_k + K_k (x - x_k), and the multiplier trajectory.
struct SolverSolution {
  std::vector<scalar_t> times;         // N + 1
  std::vector<vector_t> states;        // N + 1
  std::vector<vector_t> inputs;        // N
  std::vector<matrix_t> gains;         // N
  std::vector<ContactFlags> modes;     // N
  std::vector<vector_t> multipliers;   // N, sized per node
  ConvergenceReport report;

  bool empty() const { return times.empty(); }
  int numSteps() const { return static_cast<int>(inputs.size()); }

  /// Index of the step interval containing time t (clamped).
  int intervalIndex(scalar_t t) const;
  /// Policy input at time t for measured state x (zero-order-hold interval).
  vector_t policyInput(scalar_t t, const vector_t& x) const;
  /// Linear interpolation of the nominal state trajectory.
  vector_t stateAt(scalar_t t) const;
  /// Zero-order-hold of the nominal input trajectory.
  vector_t inputAt(scalar_t t) const;
};

/// Definition of one solve: problem + mode schedule + transcription grid.
/// Nodes are snapped to the switching times; each mode interval is divided
/// into equal steps no longer than `dt`.
struct OcpDefinition {
  std::shared_ptr<const OcpProblem> problem;
  ModeSchedule modeSchedule;
  scalar_t dt = 0.015;
};

struct DivergedRolloutError : std::runtime_error {
  explicit DivergedRolloutError(scalar_t time)
      : std::runtime_error("rollout diverged at t = " + std::to_string(time)), time(time) {}
  scalar_t time;
};

struct SolverFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Constrained SLQ: forward rollout over the mode schedule, LQ approximation,
/// equality projection, Riccati backward pass with an affine policy, Armijo
/// line search, wrapped in an augmented-Lagrangian loop for inequalities.
/// One instance is single-threaded; distinct instances may run concurrently.
class SlqSolver {
 public:
  SlqSolver(OcpDefinition ocp, AlSettings settings = AlSettings());

  const OcpDefinition& ocp() const { return ocp_; }
  const AlSettings& settings() const { return settings_; }

  /// Full augmented-Lagrangian solve.
  SolverSolution solve(const vector_t& x0);

  /// Warm-started solve with iteration caps (real-time iteration form).
  /// Multipliers and trajectories are taken from `warmStart` when provided.
  SolverSolution solve(const vector_t& x0, const SolverSolution* warmStart, int maxInner, int maxOuter);

  /// Open-loop rollout with the problem's initial input policy.
  SolverSolution initialRollout(const vector_t& x0) const;

  /// Rollout of a given affine policy from x0 (used by tests and the
  /// policy-consistency invariant).
  SolverSolution rolloutPolicy(const vector_t& x0, const SolverSolution& policy) const;

 private:
  struct Grid {
    std::vector<scalar_t> times;      // N + 1
    std::vector<ContactFlags> modes;  // N
  };
  struct Trajectory {
    std::vector<vector_t> states;  // N + 1
    std::vector<vector_t> inputs;  // N
  };
  struct ProjectedLq;
  struct BackwardPassResult;

  Grid buildGrid() const;

  Trajectory rollout(const Grid& grid, const vector_t& x0, const Trajectory* nominal,
                     const std::vector<matrix_t>* gains, const std::vector<vector_t>* feedforward,
                     scalar_t stepSize) const;

  /// Task cost by the transcription quadrature (no penalties).
  scalar_t taskCost(const Grid& grid, const Trajectory& traj) const;
  /// AL merit: task cost + inequality AL terms + equality quadratic penalty,
  /// along with the nonlinear constraint metrics of the trajectory.
  struct MeritValue {
    scalar_t merit = 0.0;
    scalar_t maxEquality = 0.0;
    scalar_t maxInequality = 0.0;
  };
  MeritValue meritFunction(const Grid& grid, const Trajectory& traj,
                           const std::vector<vector_t>& multipliers, scalar_t rho,
                           scalar_t equalityPenalty) const;

  std::vector<LqNode> linearizeTrajectory(const Grid& grid, const Trajectory& traj,
                                          scalar_t* derivativeError) const;

  std::vector<ProjectedLq> projectAndAugment(const Grid& grid, const Trajectory& traj,
                                             const std::vector<LqNode>& nodes,
                                             const std::vector<vector_t>& multipliers, scalar_t rho,
                                             scalar_t equalityPenalty) const;

  BackwardPassResult backwardPass(const Grid& grid, const Trajectory& traj,
                                  const std::vector<ProjectedLq>& lq) const;

  OcpDefinition ocp_;
  AlSettings settings_;
};

}  // namespace wbmpc
