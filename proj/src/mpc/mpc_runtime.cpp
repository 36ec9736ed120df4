#include "wbmpc/mpc/mpc_runtime.hpp"

namespace wbmpc {

namespace {

ContactLayout layoutOf(const KinematicTree& tree) {
  ContactLayout layout;
  layout.numContacts = tree.numContacts();
  for (int c = 0; c < tree.numContacts(); ++c) {
    if (tree.contact(c).type == ContactClass::Foot) {
      layout.feet.push_back(c);
    }
  }
  layout.arm = tree.armContactIndex();
  return layout;
}

}  // namespace

MpcRuntime::MpcRuntime(std::shared_ptr<const CentroidalOcp> problem, GaitSpec gait,
                       ManipulationSpec manipulation, MpcConfig config, AlSettings solverSettings)
    : problem_(std::move(problem)),
      gait_(gait),
      manipulation_(manipulation),
      config_(config),
      solverSettings_(solverSettings) {
  layout_ = layoutOf(problem_->model().tree());
}

ContactFlags MpcRuntime::modeAt(scalar_t t) const {
  ContactFlags mode = gaitModeAt(gait_, layout_, t);
  if (layout_.arm >= 0) {
    const auto manip = manipulationWindow(manipulation_, layout_, t - 0.5, t + 0.5);
    mode[layout_.arm] = manip.modeAt(t)[layout_.arm];
  }
  return mode;
}

void MpcRuntime::reset() {
  previous_.reset();
  coldStart_ = true;
}

MpcRuntime::StepResult MpcRuntime::step(const vector_t& measuredState, scalar_t clockTime) {
  OcpDefinition ocp;
  ocp.problem = problem_;
  ocp.modeSchedule =
      buildModeSchedule(gait_, manipulation_, layout_, clockTime, clockTime + config_.horizon);
  ocp.dt = config_.dt;

  SlqSolver solver(ocp, solverSettings_);

  StepResult result;
  result.clockTime = clockTime;

  SolverSolution solution;
  if (coldStart_ && config_.fullFirstSolve) {
    solution = solver.solve(measuredState);
  } else {
    const SolverSolution* warm = previous_ ? &*previous_ : nullptr;
    solution = solver.solve(measuredState, warm, config_.rtInnerIterations, config_.rtOuterIterations);
  }

  if (!solution.empty() && solution.report.failure.empty()) {
    previous_ = solution;
    coldStart_ = false;
    result.solution = std::move(solution);
  } else if (previous_) {
    // Diverged or failed replan: keep flying the previous policy.
    result.solution = *previous_;
    result.solution.report.failure = solution.report.failure.empty()
                                         ? "replan failed; reusing previous policy"
                                         : solution.report.failure;
    result.usedFallback = true;
  } else {
    result.solution = std::move(solution);
    result.usedFallback = true;
  }

  result.references = buildTrackingReferences(problem_->model(), result.solution,
                                              config_.referenceSampleDt, config_.exactFootAcceleration);
  return result;
}

MpcActor::MpcActor(std::shared_ptr<MpcRuntime> runtime) : runtime_(std::move(runtime)) {
  thread_ = std::thread([this] { loop(); });
}

MpcActor::~MpcActor() { stop(); }

void MpcActor::postState(const vector_t& state, scalar_t clockTime) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    mailbox_ = std::make_pair(state, clockTime);
  }
  cv_.notify_all();
}

std::shared_ptr<const MpcRuntime::StepResult> MpcActor::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return snapshot_;
}

std::shared_ptr<const MpcRuntime::StepResult> MpcActor::waitForFirstPlan() {
  std::unique_lock<std::mutex> lock(mutex_);
  cv_.wait(lock, [this] { return snapshot_ != nullptr || stop_; });
  return snapshot_;
}

void MpcActor::stop() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) {
    thread_.join();
  }
}

void MpcActor::loop() {
  while (true) {
    std::pair<vector_t, scalar_t> request;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      cv_.wait(lock, [this] { return mailbox_.has_value() || stop_; });
      if (stop_) {
        return;
      }
      request = std::move(*mailbox_);
      mailbox_.reset();
    }
    auto result = std::make_shared<MpcRuntime::StepResult>(runtime_->step(request.first, request.second));
    {
      std::lock_guard<std::mutex> lock(mutex_);
      snapshot_ = std::move(result);
    }
    cv_.notify_all();
  }
}

}  // namespace wbmpc
