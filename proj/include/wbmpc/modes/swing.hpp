#pragma once

#include <memory>

#include "wbmpc/modes/gait.hpp"
#include "wbmpc/types.hpp"

namespace wbmpc {

/// Reference motion of a swing foot along the surface normal. The height
/// curve is apex * (1 - cos(2*pi*tau)) / 2 over tau in [0, 1]: zero boundary
/// velocities, apex at mid-swing, and the height integral closes at
/// touchdown.
struct SwingProfile {
  scalar_t liftoffTime = 0.0;
  scalar_t touchdownTime = 1.0;
  scalar_t apexHeight = 0.1;                 // m, > 0
  vector3_t normal = vector3_t::UnitZ();     // unit surface normal

  scalar_t duration() const { return touchdownTime - liftoffTime; }
};

/// Normal-direction velocity reference v*(t). Throws outside the swing window.
scalar_t swingNormalVelocity(const SwingProfile& profile, scalar_t t);

/// Height of the reference curve above the liftoff point.
scalar_t swingHeight(const SwingProfile& profile, scalar_t t);

/// Normal-direction acceleration of the reference curve.
scalar_t swingNormalAcceleration(const SwingProfile& profile, scalar_t t);

/// Normal-direction swing reference of open feet; contacts without an active
/// swing (or non-foot contacts) report zero.
class SwingReferenceProvider {
 public:
  virtual ~SwingReferenceProvider() = default;
  virtual scalar_t normalVelocity(int contactIndex, scalar_t t) const = 0;
  virtual vector3_t normal(int contactIndex) const { return vector3_t::UnitZ(); }
};

class ZeroSwingReference final : public SwingReferenceProvider {
 public:
  scalar_t normalVelocity(int, scalar_t) const override { return 0.0; }
};

/// Swing references derived from a cyclic gait: each foot's open interval
/// carries the lift curve, anchored in absolute time.
class GaitSwingProvider final : public SwingReferenceProvider {
 public:
  GaitSwingProvider(GaitSpec gait, ContactLayout layout, scalar_t apexHeight,
                    std::vector<vector3_t> normals = {});

  scalar_t normalVelocity(int contactIndex, scalar_t t) const override;
  vector3_t normal(int contactIndex) const override;

 private:
  GaitSpec gait_;
  ContactLayout layout_;
  scalar_t apexHeight_;
  std::vector<vector3_t> normals_;  // per foot; empty = flat ground
};

}  // namespace wbmpc
