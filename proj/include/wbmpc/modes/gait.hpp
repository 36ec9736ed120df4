#pragma once

#include <optional>
#include <string>

#include "wbmpc/modes/mode_schedule.hpp"

namespace wbmpc {

/// Cyclic gait pattern over four feet (contact order LF, RF, LH, RH).
/// The phase is anchored at absolute time zero, so regenerating a window
/// shifted by any offset reproduces the same mode at every queried time.
struct GaitSpec {
  enum class Name { Stance, Trot, FlyingTrot };
  Name name = Name::Stance;
  scalar_t cycleDuration = 0.8;   // s
  scalar_t flightRatio = 0.2;     // flying trot only, fraction of the cycle in full flight
};

GaitSpec::Name gaitNameFromString(const std::string& s);

/// Manipulation contact schedule of the arm end-effector.
struct ManipulationSpec {
  enum class Kind { None, Grasped, ReleaseAt };
  Kind kind = Kind::None;
  scalar_t switchTime = 0.6;  // s, absolute; used by ReleaseAt
};

/// Number of contacts and which of them are feet/arm; decouples schedule
/// generation from the full model.
struct ContactLayout {
  int numContacts = 0;
  std::vector<int> feet;  // contact indices, order LF, RF, LH, RH
  int arm = -1;           // contact index or -1
};

/// Closed-foot flags of the gait at absolute time t (arm flag left open).
ContactFlags gaitModeAt(const GaitSpec& gait, const ContactLayout& layout, scalar_t t);

/// Mode schedule of the gait over the window [t0, t1], switching times in
/// absolute time.
ModeSchedule gaitSchedule(const GaitSpec& gait, const ContactLayout& layout, scalar_t t0, scalar_t t1);

/// Convenience form of the spec'd template: window [0, horizon].
ModeSchedule gaitTemplate(GaitSpec::Name name, scalar_t cycleDuration, scalar_t horizon,
                          const ContactLayout& layout, scalar_t flightRatio = 0.2);

/// Arm-only schedule over [t0, t1]: Grasped keeps the arm contact closed,
/// ReleaseAt closes it on [t0, ts) and opens it afterwards. Throws when a
/// ReleaseAt switch time lies outside the window.
ModeSchedule manipulationTemplate(const ManipulationSpec& manip, const ContactLayout& layout,
                                  scalar_t t0, scalar_t t1);

/// Receding-horizon variant: a switch time outside [t0, t1] clamps to the
/// all-closed / all-open schedule instead of throwing.
ModeSchedule manipulationWindow(const ManipulationSpec& manip, const ContactLayout& layout,
                                scalar_t t0, scalar_t t1);

/// Full mode schedule: gait plus manipulation overlay.
ModeSchedule buildModeSchedule(const GaitSpec& gait, const ManipulationSpec& manip,
                               const ContactLayout& layout, scalar_t t0, scalar_t t1);

/// Liftoff/touchdown of the open-foot interval containing time t, in absolute
/// time (may extend beyond any generation window). Empty when the foot is
/// closed at t or is not a cyclic swing (stance gait).
struct SwingWindow {
  scalar_t liftoff;
  scalar_t touchdown;
};
std::optional<SwingWindow> swingWindowAt(const GaitSpec& gait, int footNumber, scalar_t t);

}  // namespace wbmpc
