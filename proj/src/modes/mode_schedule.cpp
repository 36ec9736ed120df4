#include "wbmpc/modes/mode_schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace wbmpc {

ModeSchedule::ModeSchedule(std::vector<scalar_t> switchingTimes, std::vector<ContactFlags> modes)
    : switchingTimes_(std::move(switchingTimes)), modes_(std::move(modes)) {
  if (switchingTimes_.size() != modes_.size() + 1 || modes_.empty()) {
    throw std::invalid_argument("ModeSchedule: need |switchingTimes| == |modes| + 1 >= 2");
  }
  for (std::size_t i = 1; i < switchingTimes_.size(); ++i) {
    if (!(switchingTimes_[i] > switchingTimes_[i - 1])) {
      throw std::invalid_argument("ModeSchedule: switching times must be strictly increasing");
    }
  }
  const std::size_t nc = modes_.front().size();
  for (const auto& m : modes_) {
    if (m.size() != nc) {
      throw std::invalid_argument("ModeSchedule: inconsistent contact-set sizes");
    }
  }
}

int ModeSchedule::modeIndexAt(scalar_t t) const {
  const auto it = std::upper_bound(switchingTimes_.begin(), switchingTimes_.end(), t);
  const int idx = static_cast<int>(it - switchingTimes_.begin()) - 1;
  return std::clamp(idx, 0, static_cast<int>(modes_.size()) - 1);
}

ModeSchedule ModeSchedule::overlay(const ModeSchedule& other, const std::vector<int>& contactIndices) const {
  std::vector<scalar_t> times = switchingTimes_;
  for (scalar_t t : other.switchingTimes()) {
    if (t > startTime() && t < endTime()) {
      times.push_back(t);
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](scalar_t a, scalar_t b) { return std::abs(a - b) < 1e-12; }),
              times.end());

  std::vector<ContactFlags> merged;
  merged.reserve(times.size() - 1);
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const scalar_t mid = 0.5 * (times[j] + times[j + 1]);
    ContactFlags flags = modeAt(mid);
    const ContactFlags& over = other.modeAt(mid);
    for (int c : contactIndices) {
      flags[c] = over[c];
    }
    merged.push_back(std::move(flags));
  }
  return ModeSchedule(std::move(times), std::move(merged));
}

std::string toString(const ContactFlags& flags) {
  std::string s;
  for (bool f : flags) {
    s.push_back(f ? '1' : '0');
  }
  return s;
}

}  // namespace wbmpc
