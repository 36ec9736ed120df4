#pragma once

#include <string>
#include <vector>

#include "wbmpc/types.hpp"

namespace wbmpc {

/// Closed-contact set over the model's contact points, indexed like
/// KinematicTree::contacts().
using ContactFlags = std::vector<bool>;

/// Mode sequence coupled with strictly increasing switching times.
/// switchingTimes() has one more entry than modes(); mode j is active on
/// [s_j, s_{j+1}) and lookup is right-continuous at the switching times.
class ModeSchedule {
 public:
  ModeSchedule() = default;
  ModeSchedule(std::vector<scalar_t> switchingTimes, std::vector<ContactFlags> modes);

  const std::vector<scalar_t>& switchingTimes() const { return switchingTimes_; }
  const std::vector<ContactFlags>& modes() const { return modes_; }

  scalar_t startTime() const { return switchingTimes_.front(); }
  scalar_t endTime() const { return switchingTimes_.back(); }

  /// Index of the mode active at time t. Times outside the horizon clamp to
  /// the first/last mode.
  int modeIndexAt(scalar_t t) const;
  const ContactFlags& modeAt(scalar_t t) const { return modes_[modeIndexAt(t)]; }

  /// Merges another schedule's switching times and replaces the flags of the
  /// given contact indices by the overlay's. Used to compose a manipulation
  /// schedule on top of a gait without touching the feet.
  ModeSchedule overlay(const ModeSchedule& other, const std::vector<int>& contactIndices) const;

 private:
  std::vector<scalar_t> switchingTimes_;
  std::vector<ContactFlags> modes_;
};

std::string toString(const ContactFlags& flags);

}  // namespace wbmpc
