#include "wbmpc/ocp/cost.hpp"

#include <stdexcept>

namespace wbmpc {

ReferenceTrajectory::ReferenceTrajectory(std::vector<scalar_t> times, std::vector<vector_t> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size() || values_.empty()) {
    throw std::invalid_argument("ReferenceTrajectory: need matching, non-empty knots");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("ReferenceTrajectory: knot times must be increasing");
    }
    if (values_[i].size() != values_[0].size()) {
      throw std::invalid_argument("ReferenceTrajectory: inconsistent value dimensions");
    }
  }
}

ReferenceTrajectory ReferenceTrajectory::constant(vector_t value) {
  ReferenceTrajectory ref;
  ref.times_ = {0.0};
  ref.values_ = {std::move(value)};
  return ref;
}

vector_t ReferenceTrajectory::at(scalar_t t) const {
  if (values_.empty()) {
    throw std::logic_error("ReferenceTrajectory: empty");
  }
  if (t <= times_.front() || values_.size() == 1) {
    return values_.front();
  }
  if (t >= times_.back()) {
    return values_.back();
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times_.begin());
  const scalar_t a = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);
  return (1.0 - a) * values_[j - 1] + a * values_[j];
}

vector_t ReferenceTrajectory::atOrZero(scalar_t t, int dim) const {
  return empty() ? vector_t::Zero(dim) : at(t);
}

void TaskCostWeights::validate(const SystemDims& dims) const {
  const auto checkNonNegative = [](const vector_t& w, int dim, const char* name) {
    if (w.size() != dim) {
      throw std::invalid_argument(std::string("TaskCostWeights: ") + name + " has wrong dimension");
    }
    if (w.size() > 0 && w.minCoeff() < 0.0) {
      throw std::invalid_argument(std::string("TaskCostWeights: ") + name + " must be nonnegative");
    }
  };
  checkNonNegative(robotState, dims.robotStateDim(), "robotState");
  checkNonNegative(terminalRobotState, dims.robotStateDim(), "terminalRobotState");
  checkNonNegative(object, 2 * dims.objectDim, "object");
  checkNonNegative(terminalObject, 2 * dims.objectDim, "terminalObject");
  if (input.size() != dims.inputDim() || input.minCoeff() <= 0.0) {
    throw std::invalid_argument("TaskCostWeights: input weights must be positive (R is SPD)");
  }
  if (eePosition.minCoeff() < 0.0 || eeOrientation.minCoeff() < 0.0 ||
      terminalEePosition.minCoeff() < 0.0 || terminalEeOrientation.minCoeff() < 0.0) {
    throw std::invalid_argument("TaskCostWeights: end-effector weights must be nonnegative");
  }
}

}  // namespace wbmpc
