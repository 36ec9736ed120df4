#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wbmpc/dynamics/centroidal_model.hpp"
#include "wbmpc/modes/mode_schedule.hpp"
#include "wbmpc/modes/swing.hpp"

namespace wbmpc {

struct Limits {
  scalar_t frictionCoefficient = 0.7;  // mu_s
  scalar_t coneEpsilon = 0.5;          // N, smoothing of the cone at zero tangential force
};

/// One group of equality constraints g(x, u, t) = 0 with its linearization.
struct EqualityBlock {
  std::string label;
  vector_t residual;
  matrix_t dgdx;
  matrix_t dgdu;
  bool inputInvolved = true;  // handled by projection; state-only blocks go to the penalty slot
};

enum class InequalityLabel { VelocityLimit, TorqueLimit, FrictionCone };

/// One group of inequality constraints h(x, u) >= 0 with its linearization.
struct InequalityBlock {
  std::string label;
  InequalityLabel kind = InequalityLabel::FrictionCone;
  vector_t residual;
  matrix_t dhdx;
  matrix_t dhdu;
};

/// Mode-dependent constraint set of the OC problem: per contact, the closed
/// and open velocity/force equalities, plus the joint velocity, arm torque,
/// and friction-cone inequalities.
class ConstraintBank {
 public:
  ConstraintBank(std::shared_ptr<const CentroidalModel> model,
                 std::shared_ptr<const SwingReferenceProvider> swing, Limits limits);

  const Limits& limits() const { return limits_; }

  /// Residuals only (no jacobians required in `eval`).
  std::vector<EqualityBlock> equalityResiduals(scalar_t t, const vector_t& x, const vector_t& u,
                                               const ContactFlags& mode, const ModelEvaluation& eval) const;
  std::vector<InequalityBlock> inequalityResiduals(const vector_t& x, const vector_t& u,
                                                   const ContactFlags& mode,
                                                   const ModelEvaluation& eval) const;

  /// Residuals plus jacobians. `qPerturbed` must hold +/- evaluations (built
  /// with jacobians) for each of the 6 + n_a configuration coordinates; the
  /// remaining blocks are closed-form.
  std::vector<EqualityBlock> equalities(
      scalar_t t, const vector_t& x, const vector_t& u, const ContactFlags& mode,
      const ModelEvaluation& eval,
      const std::vector<std::pair<ModelEvaluation, ModelEvaluation>>& qPerturbed, scalar_t qStep) const;
  std::vector<InequalityBlock> inequalities(
      const vector_t& x, const vector_t& u, const ContactFlags& mode, const ModelEvaluation& eval,
      const std::vector<std::pair<ModelEvaluation, ModelEvaluation>>& qPerturbed, scalar_t qStep) const;

  /// Convenience entry points that build the evaluations internally.
  std::vector<EqualityBlock> equalities(scalar_t t, const vector_t& x, const vector_t& u,
                                        const ContactFlags& mode) const;
  std::vector<InequalityBlock> inequalities(const vector_t& x, const vector_t& u,
                                            const ContactFlags& mode) const;

  /// Worst equality residual / inequality violation (max over rows).
  scalar_t maxEqualityViolation(scalar_t t, const vector_t& x, const vector_t& u,
                                const ContactFlags& mode) const;
  scalar_t maxInequalityViolation(const vector_t& x, const vector_t& u, const ContactFlags& mode) const;

  int equalityRowCount(const ContactFlags& mode) const;
  int inequalityRowCount(const ContactFlags& mode) const;

  const CentroidalModel& model() const { return *model_; }

 private:
  /// Generalized velocity (qdot_b from Eq. (5), v_j) at one evaluation.
  vector_t generalizedVelocity(const vector_t& x, const vector_t& u,
                               const ModelEvaluation& eval) const;
  /// World velocity of contact c as a function of (x, u) through Eq. (5).
  vector3_t contactVelocity(int contact, const vector_t& x, const vector_t& u,
                            const ModelEvaluation& eval) const;
  vector_t torqueEstimate(const vector_t& u, const ModelEvaluation& eval) const;

  std::shared_ptr<const CentroidalModel> model_;
  std::shared_ptr<const SwingReferenceProvider> swing_;
  Limits limits_;
};

}  // namespace wbmpc
