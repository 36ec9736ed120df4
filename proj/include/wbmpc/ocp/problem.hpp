#pragma once

#include <memory>
#include <vector>

#include "wbmpc/constraints/constraint_bank.hpp"
#include "wbmpc/modes/mode_schedule.hpp"

namespace wbmpc {

/// Quadratic expansion of a cost term around a nominal point.
struct CostQuadratics {
  scalar_t value = 0.0;
  vector_t dfdx;
  matrix_t dfdxx;
  vector_t dfdu;   // empty for terminal terms
  matrix_t dfduu;
  matrix_t dfdux;  // nu x nx
};

/// Complete LQ data of one node: continuous-time flow Jacobians, stage-cost
/// quadratics (per unit time), and the node's constraint blocks.
struct LqNode {
  matrix_t dfdx;
  matrix_t dfdu;
  CostQuadratics cost;
  std::vector<EqualityBlock> equalities;
  std::vector<InequalityBlock> inequalities;
};

/// The optimal control problem seen by the solver: flow map, stage/terminal
/// cost, and mode-dependent constraints, all evaluated per node.
class OcpProblem {
 public:
  virtual ~OcpProblem() = default;

  virtual int stateDim() const = 0;
  virtual int inputDim() const = 0;

  virtual vector_t flow(scalar_t t, const vector_t& x, const vector_t& u,
                        const ContactFlags& mode) const = 0;
  virtual scalar_t stageCost(scalar_t t, const vector_t& x, const vector_t& u,
                             const ContactFlags& mode) const = 0;
  virtual scalar_t terminalCost(const vector_t& x) const = 0;
  virtual CostQuadratics terminalQuadratics(const vector_t& x) const = 0;

  /// Full linearization at one node. Implementations may share expensive
  /// precomputations across the dynamics, cost, and constraint entries.
  virtual LqNode linearizeNode(scalar_t t, const vector_t& x, const vector_t& u,
                               const ContactFlags& mode) const = 0;

  /// Residual-only inequality evaluation, stacked in the same row order as
  /// the blocks of linearizeNode. Used by the augmented-Lagrangian loop.
  virtual vector_t inequalityResiduals(scalar_t t, const vector_t& x, const vector_t& u,
                                       const ContactFlags& mode) const = 0;

  /// Residual-only equality evaluation, stacked (input-involved blocks first,
  /// in block order).
  virtual vector_t equalityResiduals(scalar_t t, const vector_t& x, const vector_t& u,
                                     const ContactFlags& mode) const = 0;

  /// Nominal input used to bootstrap the very first rollout.
  virtual vector_t initialInput(scalar_t /*t*/, const vector_t& /*x*/, const ContactFlags& /*mode*/) const {
    return vector_t::Zero(inputDim());
  }

  /// Everything the merit function needs at one node. Implementations may
  /// share precomputations; the default just calls the three entries.
  struct StagePieces {
    scalar_t cost = 0.0;
    vector_t equalities;
    vector_t inequalities;
  };
  virtual StagePieces stagePieces(scalar_t t, const vector_t& x, const vector_t& u,
                                  const ContactFlags& mode) const {
    return {stageCost(t, x, u, mode), equalityResiduals(t, x, u, mode),
            inequalityResiduals(t, x, u, mode)};
  }
};

/// Finite-difference reference of linearizeNode; ground truth for the
/// solver's derivative-verification mode.
LqNode linearizeNodeFd(const OcpProblem& problem, scalar_t t, const vector_t& x, const vector_t& u,
                       const ContactFlags& mode, scalar_t eps = 1e-6);

/// Worst relative error between structured and finite-difference LQ data.
scalar_t compareLqNodes(const LqNode& node, const LqNode& fd);

}  // namespace wbmpc
