#pragma once

#include <random>

#include "wbmpc/dynamics/centroidal_model.hpp"

namespace wbmpc {

/// Optional mismatches between the plant and the planner model.
struct PlantPerturbations {
  std::string payloadLink;                     // empty: none
  scalar_t payloadMass = 0.0;                  // kg, added at payloadOffset
  vector3_t payloadOffset = vector3_t::Zero(); // link frame
  scalar_t objectInertiaScale = 1.0;
  scalar_t objectDampingScale = 1.0;
  scalar_t objectRecoilScale = 1.0;
  scalar_t frictionOverride = -1.0;            // plant-side mu_s; < 0 disables the audit
};

/// Time-windowed generalized disturbance forces.
struct DisturbanceWindow {
  scalar_t start = 0.0;
  scalar_t end = 0.0;
  vector6_t baseWrench = vector6_t::Zero();  // added to hdot_com
  vector_t objectForce;                      // generalized force on the object
};

struct PlantConfig {
  scalar_t dt = 0.0025;
  PlantPerturbations perturbations;
  std::vector<DisturbanceWindow> disturbances;
  vector_t sensorNoiseSigma;  // per state channel; empty disables noise
};

/// Applies the payload perturbation: the combined body keeps the same frame,
/// with mass, CoM, and inertia updated by the parallel-axis rules.
KinematicTree perturbTree(const KinematicTree& tree, const PlantPerturbations& p);

/// Closed-loop plant: integrates the (possibly perturbed) augmented template
/// dynamics under externally supplied inputs, injecting scheduled
/// disturbances.
class Plant {
 public:
  Plant(std::shared_ptr<const CentroidalModel> model, PlantConfig config, std::uint64_t seed);

  const CentroidalModel& model() const { return *model_; }
  const PlantConfig& config() const { return config_; }

  /// One RK4 step of length config().dt from state x under input u.
  vector_t step(scalar_t t, const vector_t& x, const vector_t& u) const;

  /// Measurement fed back to the planner (adds sensor noise when configured).
  vector_t measure(const vector_t& x);

  /// True while any disturbance window covers t.
  bool disturbanceActive(scalar_t t) const;

  /// Worst plant-side friction-cone violation of the applied input, using
  /// the friction override; 0 when the audit is disabled.
  scalar_t frictionAudit(const vector_t& u) const;

 private:
  vector_t flowWithDisturbance(scalar_t t, const vector_t& x, const vector_t& u) const;

  std::shared_ptr<const CentroidalModel> model_;
  PlantConfig config_;
  std::mt19937_64 rng_;
  std::normal_distribution<scalar_t> gauss_{0.0, 1.0};
};

}  // namespace wbmpc
