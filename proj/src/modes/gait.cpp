#include "wbmpc/modes/gait.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace wbmpc {

namespace {

scalar_t wrappedPhase(scalar_t x) {
  const scalar_t p = std::fmod(x, 1.0);
  return p < 0.0 ? p + 1.0 : p;
}

/// Closed interval of foot `footNumber` in phase units: start and duration.
std::pair<scalar_t, scalar_t> closedInterval(const GaitSpec& gait, int footNumber) {
  const bool pairA = (footNumber == 0 || footNumber == 3);  // LF+RH
  switch (gait.name) {
    case GaitSpec::Name::Stance:
      return {0.0, 1.0};
    case GaitSpec::Name::Trot:
      return {pairA ? 0.0 : 0.5, 0.5};
    case GaitSpec::Name::FlyingTrot: {
      const scalar_t stanceFraction = 0.5 * (1.0 - gait.flightRatio);
      return {pairA ? 0.0 : 0.5, stanceFraction};
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<scalar_t> phaseBoundaries(const GaitSpec& gait) {
  switch (gait.name) {
    case GaitSpec::Name::Stance:
      return {};
    case GaitSpec::Name::Trot:
      return {0.0, 0.5};
    case GaitSpec::Name::FlyingTrot: {
      const scalar_t s = 0.5 * (1.0 - gait.flightRatio);
      return {0.0, s, 0.5, 0.5 + s};
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

GaitSpec::Name gaitNameFromString(const std::string& s) {
  if (s == "stance") {
    return GaitSpec::Name::Stance;
  }
  if (s == "trot") {
    return GaitSpec::Name::Trot;
  }
  if (s == "flying_trot") {
    return GaitSpec::Name::FlyingTrot;
  }
  throw std::invalid_argument("unknown gait '" + s + "' (expected stance|trot|flying_trot)");
}

ContactFlags gaitModeAt(const GaitSpec& gait, const ContactLayout& layout, scalar_t t) {
  ContactFlags flags(layout.numContacts, false);
  for (std::size_t f = 0; f < layout.feet.size(); ++f) {
    const auto [start, duration] = closedInterval(gait, static_cast<int>(f));
    const scalar_t u = wrappedPhase(t / gait.cycleDuration - start);
    flags[layout.feet[f]] = (u < duration - 1e-12) || duration >= 1.0;
  }
  return flags;
}

ModeSchedule gaitSchedule(const GaitSpec& gait, const ContactLayout& layout, scalar_t t0, scalar_t t1) {
  if (!(t1 > t0) || gait.cycleDuration <= 0.0) {
    throw std::invalid_argument("gaitSchedule: need t1 > t0 and cycle > 0");
  }
  std::set<scalar_t> times{t0, t1};
  const scalar_t c = gait.cycleDuration;
  for (scalar_t b : phaseBoundaries(gait)) {
    for (long k = static_cast<long>(std::floor(t0 / c)) - 1;; ++k) {
      const scalar_t s = (static_cast<scalar_t>(k) + b) * c;
      if (s >= t1 - 1e-12) {
        break;
      }
      if (s > t0 + 1e-12) {
        times.insert(s);
      }
    }
  }
  std::vector<scalar_t> switching(times.begin(), times.end());
  std::vector<ContactFlags> modes;
  for (std::size_t j = 0; j + 1 < switching.size(); ++j) {
    modes.push_back(gaitModeAt(gait, layout, 0.5 * (switching[j] + switching[j + 1])));
  }
  return ModeSchedule(std::move(switching), std::move(modes));
}

ModeSchedule gaitTemplate(GaitSpec::Name name, scalar_t cycleDuration, scalar_t horizon,
                          const ContactLayout& layout, scalar_t flightRatio) {
  GaitSpec gait;
  gait.name = name;
  gait.cycleDuration = cycleDuration;
  gait.flightRatio = flightRatio;
  return gaitSchedule(gait, layout, 0.0, horizon);
}

ModeSchedule manipulationTemplate(const ManipulationSpec& manip, const ContactLayout& layout,
                                  scalar_t t0, scalar_t t1) {
  if (manip.kind == ManipulationSpec::Kind::ReleaseAt &&
      (manip.switchTime <= t0 || manip.switchTime >= t1)) {
    throw std::invalid_argument("manipulationTemplate: release time " +
                                std::to_string(manip.switchTime) + " outside the horizon");
  }
  return manipulationWindow(manip, layout, t0, t1);
}

ModeSchedule manipulationWindow(const ManipulationSpec& manip, const ContactLayout& layout,
                                scalar_t t0, scalar_t t1) {
  if (layout.arm < 0 && manip.kind != ManipulationSpec::Kind::None) {
    throw std::invalid_argument("manipulation schedule: model has no arm contact");
  }
  ContactFlags open(layout.numContacts, false);
  ContactFlags closed(layout.numContacts, false);
  if (layout.arm >= 0) {
    closed[layout.arm] = true;
  }

  switch (manip.kind) {
    case ManipulationSpec::Kind::None:
      return ModeSchedule({t0, t1}, {open});
    case ManipulationSpec::Kind::Grasped:
      return ModeSchedule({t0, t1}, {closed});
    case ManipulationSpec::Kind::ReleaseAt:
      if (manip.switchTime <= t0) {
        return ModeSchedule({t0, t1}, {open});  // released before the window
      }
      if (manip.switchTime >= t1) {
        return ModeSchedule({t0, t1}, {closed});  // releases after the window
      }
      return ModeSchedule({t0, manip.switchTime, t1}, {closed, open});
  }
  throw std::logic_error("unreachable");
}

ModeSchedule buildModeSchedule(const GaitSpec& gait, const ManipulationSpec& manip,
                               const ContactLayout& layout, scalar_t t0, scalar_t t1) {
  const ModeSchedule feet = gaitSchedule(gait, layout, t0, t1);
  if (layout.arm < 0) {
    return feet;
  }
  return feet.overlay(manipulationWindow(manip, layout, t0, t1), {layout.arm});
}

std::optional<SwingWindow> swingWindowAt(const GaitSpec& gait, int footNumber, scalar_t t) {
  const auto [start, duration] = closedInterval(gait, footNumber);
  if (duration >= 1.0) {
    return std::nullopt;
  }
  const scalar_t c = gait.cycleDuration;
  const scalar_t u = wrappedPhase(t / c - start);
  if (u < duration - 1e-12) {
    return std::nullopt;
  }
  return SwingWindow{t - (u - duration) * c, t + (1.0 - u) * c};
}

}  // namespace wbmpc
