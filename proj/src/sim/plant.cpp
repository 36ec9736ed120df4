#include "wbmpc/sim/plant.hpp"

#include <stdexcept>

#include "wbmpc/rotations.hpp"

namespace wbmpc {

KinematicTree perturbTree(const KinematicTree& tree, const PlantPerturbations& p) {
  std::vector<Link> links = tree.links();
  if (!p.payloadLink.empty() && p.payloadMass != 0.0) {
    const int idx = tree.linkIndex(p.payloadLink);
    if (idx < 0) {
      throw std::invalid_argument("perturbTree: unknown payload link '" + p.payloadLink + "'");
    }
    Link& link = links[idx];
    const scalar_t m0 = link.mass;
    const scalar_t m1 = p.payloadMass;
    if (m0 + m1 <= 0.0) {
      throw std::invalid_argument("perturbTree: payload would make the link mass non-positive");
    }
    const vector3_t newCom = (m0 * link.comOffset + m1 * p.payloadOffset) / (m0 + m1);
    const vector3_t d0 = link.comOffset - newCom;
    const vector3_t d1 = p.payloadOffset - newCom;
    link.inertia += -m0 * skew(d0) * skew(d0) - m1 * skew(d1) * skew(d1);
    link.comOffset = newCom;
    link.mass = m0 + m1;
  }

  std::vector<JointLimit> limits(tree.numJoints());
  for (int j = 0; j < tree.numJoints(); ++j) {
    limits[j] = tree.jointLimit(j);
  }
  std::vector<int> armLinks = tree.armLinks();
  KinematicTree out(std::move(links), tree.contacts(), std::move(armLinks), std::move(limits));
  out.setPitchGuard(tree.pitchGuard());
  return out;
}

Plant::Plant(std::shared_ptr<const CentroidalModel> model, PlantConfig config, std::uint64_t seed)
    : model_(std::move(model)), config_(std::move(config)), rng_(seed) {
  if (!(config_.dt > 0.0)) {
    throw std::invalid_argument("Plant: dt must be positive");
  }
  if (config_.sensorNoiseSigma.size() != 0 &&
      config_.sensorNoiseSigma.size() != model_->dims().stateDim()) {
    throw std::invalid_argument("Plant: sensor noise sigma dimension mismatch");
  }
}

bool Plant::disturbanceActive(scalar_t t) const {
  for (const auto& w : config_.disturbances) {
    if (t >= w.start && t < w.end) {
      return true;
    }
  }
  return false;
}

vector_t Plant::flowWithDisturbance(scalar_t t, const vector_t& x, const vector_t& u) const {
  vector_t xdot = model_->flow(t, x, u);
  const auto& dims = model_->dims();
  for (const auto& w : config_.disturbances) {
    if (t < w.start || t >= w.end) {
      continue;
    }
    xdot.head<6>() += w.baseWrench;
    if (dims.objectDim > 0 && w.objectForce.size() == dims.objectDim) {
      xdot.tail(dims.objectDim) += model_->object()->inertia().ldlt().solve(w.objectForce);
    }
  }
  return xdot;
}

vector_t Plant::step(scalar_t t, const vector_t& x, const vector_t& u) const {
  const scalar_t h = config_.dt;
  const vector_t k1 = flowWithDisturbance(t, x, u);
  const vector_t k2 = flowWithDisturbance(t + 0.5 * h, x + 0.5 * h * k1, u);
  const vector_t k3 = flowWithDisturbance(t + 0.5 * h, x + 0.5 * h * k2, u);
  const vector_t k4 = flowWithDisturbance(t + h, x + h * k3, u);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

vector_t Plant::measure(const vector_t& x) {
  if (config_.sensorNoiseSigma.size() == 0) {
    return x;
  }
  vector_t noisy = x;
  for (int i = 0; i < x.size(); ++i) {
    noisy(i) += config_.sensorNoiseSigma(i) * gauss_(rng_);
  }
  return noisy;
}

scalar_t Plant::frictionAudit(const vector_t& u) const {
  const scalar_t mu = config_.perturbations.frictionOverride;
  if (mu <= 0.0) {
    return 0.0;
  }
  const auto& dims = model_->dims();
  const auto& tree = model_->tree();
  scalar_t worst = 0.0;
  for (int c = 0; c < dims.numContacts; ++c) {
    if (tree.contact(c).type != ContactClass::Foot) {
      continue;
    }
    const vector3_t f = dims.contactForce(u, c);
    if (f.norm() < 1e-6) {
      continue;
    }
    worst = std::max(worst, std::hypot(f.x(), f.y()) - mu * f.z());
  }
  return std::max(0.0, worst);
}

}  // namespace wbmpc
