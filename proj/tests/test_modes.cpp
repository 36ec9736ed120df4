#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wbmpc/modes/gait.hpp"
#include "wbmpc/modes/swing.hpp"

using namespace wbmpc;

namespace {

ContactLayout quadLayout() {
  ContactLayout layout;
  layout.numContacts = 5;
  layout.feet = {0, 1, 2, 3};
  layout.arm = 4;
  return layout;
}

int closedFeetCount(const ContactFlags& flags, const ContactLayout& layout) {
  int n = 0;
  for (int f : layout.feet) {
    n += flags[f] ? 1 : 0;
  }
  return n;
}

}  // namespace

TEST_CASE("gait template: stance is one all-feet mode") {
  const auto layout = quadLayout();
  const auto schedule = gaitTemplate(GaitSpec::Name::Stance, 0.8, 1.0, layout);
  REQUIRE(schedule.modes().size() == 1);
  CHECK(closedFeetCount(schedule.modes()[0], layout) == 4);
  CHECK_FALSE(schedule.modes()[0][layout.arm]);
}

TEST_CASE("gait template: trot alternates diagonal pairs") {
  const auto layout = quadLayout();
  const auto schedule = gaitTemplate(GaitSpec::Name::Trot, 0.8, 1.6, layout);
  REQUIRE(schedule.modes().size() == 4);
  for (std::size_t j = 0; j < schedule.modes().size(); ++j) {
    const auto& m = schedule.modes()[j];
    const bool pairA = (j % 2 == 0);
    CHECK(m[0] == pairA);   // LF
    CHECK(m[3] == pairA);   // RH
    CHECK(m[1] == !pairA);  // RF
    CHECK(m[2] == !pairA);  // LH
  }
  const std::vector<scalar_t> expected{0.0, 0.4, 0.8, 1.2, 1.6};
  REQUIRE(schedule.switchingTimes().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(schedule.switchingTimes()[i] == doctest::Approx(expected[i]));
  }
}

TEST_CASE("gait template: flying trot interval bookkeeping") {
  const auto layout = quadLayout();
  const scalar_t cycle = 1.0, flightRatio = 0.2;
  GaitSpec gait{GaitSpec::Name::FlyingTrot, cycle, flightRatio};
  const auto schedule = gaitSchedule(gait, layout, 0.0, 2.0);

  scalar_t flightTime = 0.0;
  std::array<scalar_t, 4> stanceTime{};
  for (std::size_t j = 0; j < schedule.modes().size(); ++j) {
    const scalar_t len = schedule.switchingTimes()[j + 1] - schedule.switchingTimes()[j];
    if (closedFeetCount(schedule.modes()[j], layout) == 0) {
      flightTime += len;
    }
    for (int f = 0; f < 4; ++f) {
      if (schedule.modes()[j][layout.feet[f]]) {
        stanceTime[f] += len;
      }
    }
  }
  CHECK(flightTime == doctest::Approx(flightRatio * 2.0));
  for (int f = 0; f < 4; ++f) {
    CHECK(stanceTime[f] == doctest::Approx(0.5 * (1.0 - flightRatio) * 2.0));
  }
}

TEST_CASE("manipulation template: grasped and release_at") {
  const auto layout = quadLayout();
  ManipulationSpec grasped{ManipulationSpec::Kind::Grasped, 0.0};
  const auto g = manipulationTemplate(grasped, layout, 0.0, 1.0);
  for (const auto& m : g.modes()) {
    CHECK(m[layout.arm]);
  }

  ManipulationSpec release{ManipulationSpec::Kind::ReleaseAt, 0.6};
  const auto r = manipulationTemplate(release, layout, 0.0, 1.0);
  CHECK(r.modeAt(0.0)[layout.arm]);
  CHECK(r.modeAt(0.5999)[layout.arm]);
  CHECK_FALSE(r.modeAt(0.6)[layout.arm]);  // right-continuous at the switch
  CHECK_FALSE(r.modeAt(0.99)[layout.arm]);

  ManipulationSpec bad{ManipulationSpec::Kind::ReleaseAt, 0.6};
  CHECK_THROWS_AS(manipulationTemplate(bad, layout, 0.0, 0.5), std::invalid_argument);
  // The receding-horizon window form clamps instead.
  CHECK(manipulationWindow(bad, layout, 0.0, 0.5).modeAt(0.2)[layout.arm]);
  CHECK_FALSE(manipulationWindow(bad, layout, 0.7, 1.2).modeAt(0.8)[layout.arm]);
}

TEST_CASE("manipulation overlay leaves feet modes untouched") {
  const auto layout = quadLayout();
  GaitSpec trot{GaitSpec::Name::Trot, 0.8, 0.2};
  ManipulationSpec release{ManipulationSpec::Kind::ReleaseAt, 0.6};
  const auto composed = buildModeSchedule(trot, release, layout, 0.0, 1.6);
  const auto feetOnly = gaitSchedule(trot, layout, 0.0, 1.6);

  for (scalar_t t = 0.0; t < 1.6; t += 0.01) {
    const auto& m = composed.modeAt(t);
    const auto& feet = feetOnly.modeAt(t);
    for (int f : layout.feet) {
      CHECK(m[f] == feet[f]);
    }
    CHECK(m[layout.arm] == (t < 0.6));
  }
}

TEST_CASE("mode lookup: binary search agrees with linear scan") {
  const auto layout = quadLayout();
  GaitSpec gait{GaitSpec::Name::FlyingTrot, 0.7, 0.25};
  const auto schedule = gaitSchedule(gait, layout, 0.3, 2.9);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<scalar_t> u(0.3, 2.9);
  for (int i = 0; i < 500; ++i) {
    const scalar_t t = u(rng);
    int linear = 0;
    while (linear + 1 < static_cast<int>(schedule.modes().size()) &&
           schedule.switchingTimes()[linear + 1] <= t) {
      ++linear;
    }
    CHECK(schedule.modeIndexAt(t) == linear);
  }
  // Right-continuity at every switching time.
  for (std::size_t j = 1; j + 1 < schedule.switchingTimes().size(); ++j) {
    CHECK(schedule.modeIndexAt(schedule.switchingTimes()[j]) == static_cast<int>(j));
  }
}

TEST_CASE("receding-horizon consistency of cyclic gaits") {
  const auto layout = quadLayout();
  GaitSpec gait{GaitSpec::Name::Trot, 0.8, 0.2};
  const auto a = gaitSchedule(gait, layout, 0.0, 2.0);
  const auto b = gaitSchedule(gait, layout, 0.73, 2.73);
  for (scalar_t t = 0.73; t < 2.0; t += 0.013) {
    CHECK(toString(a.modeAt(t)) == toString(b.modeAt(t)));
  }
}

TEST_CASE("swing reference: boundary values, closed integral, analytic peak") {
  SwingProfile profile;
  profile.liftoffTime = 0.2;
  profile.touchdownTime = 0.6;
  profile.apexHeight = 0.1;

  CHECK(swingNormalVelocity(profile, 0.2) == doctest::Approx(0.0));
  CHECK(swingNormalVelocity(profile, 0.6) == doctest::Approx(0.0).epsilon(1e-12));

  // Trapezoid integral of v* over the swing returns to zero height.
  scalar_t integral = 0.0;
  const int n = 2000;
  const scalar_t dt = profile.duration() / n;
  for (int i = 0; i < n; ++i) {
    integral += 0.5 * dt *
                (swingNormalVelocity(profile, profile.liftoffTime + i * dt) +
                 swingNormalVelocity(profile, profile.liftoffTime + (i + 1) * dt));
  }
  CHECK(integral == doctest::Approx(0.0).epsilon(1e-9));

  // d/dt [apex (1 - cos(2 pi tau)) / 2] peaks at tau = 1/4 with apex*pi/T.
  const scalar_t peak = 0.1 * M_PI / 0.4;
  CHECK(swingNormalVelocity(profile, 0.3) == doctest::Approx(peak));
  CHECK(swingHeight(profile, 0.4) == doctest::Approx(0.1));

  CHECK_THROWS_AS(swingNormalVelocity(profile, 0.7), std::out_of_range);
}

TEST_CASE("swing windows of cyclic gaits") {
  GaitSpec trot{GaitSpec::Name::Trot, 0.8, 0.2};
  // LF closed on [0, 0.4), open on [0.4, 0.8).
  CHECK_FALSE(swingWindowAt(trot, 0, 0.1).has_value());
  const auto w = swingWindowAt(trot, 0, 0.5);
  REQUIRE(w.has_value());
  CHECK(w->liftoff == doctest::Approx(0.4));
  CHECK(w->touchdown == doctest::Approx(0.8));

  // Wraps across the cycle boundary for the other diagonal.
  const auto w2 = swingWindowAt(trot, 1, 0.9);
  REQUIRE(w2.has_value());
  CHECK(w2->liftoff == doctest::Approx(0.8));
  CHECK(w2->touchdown == doctest::Approx(1.2));

  GaitSpec stance{GaitSpec::Name::Stance, 0.8, 0.2};
  CHECK_FALSE(swingWindowAt(stance, 0, 0.5).has_value());
}
