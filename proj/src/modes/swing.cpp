#include "wbmpc/modes/swing.hpp"

#include <cmath>
#include <stdexcept>

namespace wbmpc {

namespace {

scalar_t phaseOf(const SwingProfile& profile, scalar_t t) {
  if (!(profile.apexHeight > 0.0) || !(profile.duration() > 0.0)) {
    throw std::invalid_argument("SwingProfile: apex and duration must be positive");
  }
  if (t < profile.liftoffTime - 1e-9 || t > profile.touchdownTime + 1e-9) {
    throw std::out_of_range("swing reference queried outside the swing window");
  }
  return std::clamp((t - profile.liftoffTime) / profile.duration(), 0.0, 1.0);
}

}  // namespace

scalar_t swingNormalVelocity(const SwingProfile& profile, scalar_t t) {
  const scalar_t tau = phaseOf(profile, t);
  return profile.apexHeight * M_PI * std::sin(2.0 * M_PI * tau) / profile.duration();
}

scalar_t swingHeight(const SwingProfile& profile, scalar_t t) {
  const scalar_t tau = phaseOf(profile, t);
  return profile.apexHeight * (1.0 - std::cos(2.0 * M_PI * tau)) / 2.0;
}

scalar_t swingNormalAcceleration(const SwingProfile& profile, scalar_t t) {
  const scalar_t tau = phaseOf(profile, t);
  const scalar_t d = profile.duration();
  return profile.apexHeight * 2.0 * M_PI * M_PI * std::cos(2.0 * M_PI * tau) / (d * d);
}

GaitSwingProvider::GaitSwingProvider(GaitSpec gait, ContactLayout layout, scalar_t apexHeight,
                                     std::vector<vector3_t> normals)
    : gait_(gait), layout_(std::move(layout)), apexHeight_(apexHeight), normals_(std::move(normals)) {
  if (!(apexHeight_ > 0.0)) {
    throw std::invalid_argument("GaitSwingProvider: apex height must be positive");
  }
  if (!normals_.empty() && normals_.size() != layout_.feet.size()) {
    throw std::invalid_argument("GaitSwingProvider: one normal per foot required");
  }
}

scalar_t GaitSwingProvider::normalVelocity(int contactIndex, scalar_t t) const {
  for (std::size_t f = 0; f < layout_.feet.size(); ++f) {
    if (layout_.feet[f] != contactIndex) {
      continue;
    }
    const auto window = swingWindowAt(gait_, static_cast<int>(f), t);
    if (!window) {
      return 0.0;
    }
    SwingProfile profile;
    profile.liftoffTime = window->liftoff;
    profile.touchdownTime = window->touchdown;
    profile.apexHeight = apexHeight_;
    profile.normal = normal(contactIndex);
    return swingNormalVelocity(profile, t);
  }
  return 0.0;
}

vector3_t GaitSwingProvider::normal(int contactIndex) const {
  if (!normals_.empty()) {
    for (std::size_t f = 0; f < layout_.feet.size(); ++f) {
      if (layout_.feet[f] == contactIndex) {
        return normals_[f];
      }
    }
  }
  return vector3_t::UnitZ();
}

}  // namespace wbmpc
