#include "wbmpc/sim/episode.hpp"

#include <cstdio>
#include <fstream>

namespace wbmpc {

namespace {

scalar_t trackedValueOf(const TrackedSignal& tracked, const CentroidalModel& model, const vector_t& x) {
  switch (tracked.kind) {
    case TrackedSignal::Kind::StateChannel:
      return x(tracked.index);
    case TrackedSignal::Kind::EePositionAxis: {
      const auto eval = model.evaluate(model.dims().configuration(x), false);
      return contactPosition(model.tree(), eval.kin, model.tree().armContactIndex())(tracked.index);
    }
  }
  return 0.0;
}

bool stateOk(const vector_t& x) { return x.allFinite() && x.cwiseAbs().maxCoeff() < 1e7; }

}  // namespace

std::pair<scalar_t, scalar_t> auditSolution(const CentroidalOcp& problem, const SolverSolution& solution) {
  scalar_t maxEq = 0.0, maxIneq = 0.0;
  for (int k = 0; k < solution.numSteps(); ++k) {
    const vector_t e = problem.equalityResiduals(solution.times[k], solution.states[k],
                                                 solution.inputs[k], solution.modes[k]);
    if (e.size() > 0) {
      maxEq = std::max(maxEq, e.cwiseAbs().maxCoeff());
    }
    const vector_t h = problem.inequalityResiduals(solution.times[k], solution.states[k],
                                                   solution.inputs[k], solution.modes[k]);
    if (h.size() > 0) {
      maxIneq = std::max(maxIneq, std::max(0.0, -h.minCoeff()));
    }
  }
  return {maxEq, maxIneq};
}

EpisodeLog runEpisode(Plant& plant, MpcRuntime& runtime, const vector_t& x0,
                      const EpisodeConfig& config) {
  EpisodeLog log;
  log.duration = config.duration;
  log.plantDt = plant.config().dt;

  const int steps = static_cast<int>(std::round(config.duration / plant.config().dt));
  vector_t x = x0;

  std::shared_ptr<MpcRuntime> runtimeAlias(&runtime, [](MpcRuntime*) {});
  std::unique_ptr<MpcActor> actor;
  std::shared_ptr<const MpcRuntime::StepResult> plan;

  scalar_t auditedEq = 0.0, auditedIneq = 0.0;
  scalar_t nextReplan = 0.0;

  const auto adoptPlan = [&](std::shared_ptr<const MpcRuntime::StepResult> p) {
    if (p == plan || p == nullptr) {
      return;
    }
    plan = std::move(p);
    const auto [eq, ineq] = auditSolution(runtime.problem(), plan->solution);
    auditedEq = eq;
    auditedIneq = ineq;
    log.solveTimesMs.push_back(plan->solution.report.solveTimeMs);
  };

  if (config.lockstep) {
    adoptPlan(std::make_shared<MpcRuntime::StepResult>(runtime.step(plant.measure(x), 0.0)));
    nextReplan = config.mpcPeriod;
  } else {
    actor = std::make_unique<MpcActor>(runtimeAlias);
    actor->postState(plant.measure(x), 0.0);
    adoptPlan(actor->waitForFirstPlan());
    nextReplan = config.mpcPeriod;
  }
  if (plan == nullptr || plan->solution.empty()) {
    log.failed = true;
    log.failure = "no initial plan";
    return log;
  }

  for (int step = 0; step < steps; ++step) {
    const scalar_t t = step * plant.config().dt;

    if (t >= nextReplan - 1e-9) {
      try {
        if (config.lockstep) {
          adoptPlan(std::make_shared<MpcRuntime::StepResult>(runtime.step(plant.measure(x), t)));
        } else {
          actor->postState(plant.measure(x), t);
          adoptPlan(actor->snapshot());
        }
      } catch (const std::runtime_error& err) {
        log.failed = true;
        log.failure = std::string("replanning failed at t = ") + std::to_string(t) + " (" +
                      err.what() + ")";
        break;
      }
      nextReplan += config.mpcPeriod;
    } else if (!config.lockstep) {
      adoptPlan(actor->snapshot());
    }

    const vector_t u = plan->solution.policyInput(t, x);

    EpisodeRecord rec;
    rec.time = t;
    rec.plantState = x;
    rec.appliedInput = u;
    rec.plannerReferenceState = plan->solution.stateAt(t);
    rec.trackedValue = trackedValueOf(config.tracked, plant.model(), x);
    rec.trackedReference = config.tracked.reference(t);
    rec.auditedEqualityResidual = auditedEq;
    rec.auditedInequalityViolation = auditedIneq;
    rec.plannerCost = plan->solution.report.cost;
    rec.plannerIterations = plan->solution.report.innerIterations;
    rec.fallback = plan->usedFallback;
    rec.disturbanceActive = plant.disturbanceActive(t);
    rec.plantConeViolation = plant.frictionAudit(u);
    log.records.push_back(std::move(rec));

    try {
      x = plant.step(t, x, u);
    } catch (const std::runtime_error& err) {
      log.failed = true;
      log.failure = std::string("plant left the valid state set at t = ") +
                    std::to_string(t + plant.config().dt) + " (" + err.what() + ")";
      break;
    }
    if (!stateOk(x)) {
      log.failed = true;
      log.failure = "plant diverged at t = " + std::to_string(t + plant.config().dt);
      break;
    }
  }

  if (actor) {
    actor->stop();
  }
  return log;
}

void writeEpisodeCsv(const EpisodeLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("writeEpisodeCsv: cannot open '" + path + "'");
  }
  if (log.records.empty()) {
    out << "# wbmpc-episode-csv v1 (empty)\n";
    return;
  }

  const int nx = static_cast<int>(log.records.front().plantState.size());
  const int nu = static_cast<int>(log.records.front().appliedInput.size());
  out << "# wbmpc-episode-csv v1\n";
  out << "time";
  for (int i = 0; i < nx; ++i) {
    out << ",x_" << i;
  }
  for (int i = 0; i < nu; ++i) {
    out << ",u_" << i;
  }
  for (int i = 0; i < nx; ++i) {
    out << ",xref_" << i;
  }
  out << ",tracked,tracked_ref,eq_residual,ineq_violation,cost,iterations,fallback,disturbance,"
         "plant_cone_violation\n";

  char buf[32];
  const auto emit = [&](scalar_t v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << ',' << buf;
  };
  for (const auto& r : log.records) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.time);
    out << buf;
    for (int i = 0; i < nx; ++i) {
      emit(r.plantState(i));
    }
    for (int i = 0; i < nu; ++i) {
      emit(r.appliedInput(i));
    }
    for (int i = 0; i < nx; ++i) {
      emit(r.plannerReferenceState(i));
    }
    emit(r.trackedValue);
    emit(r.trackedReference);
    emit(r.auditedEqualityResidual);
    emit(r.auditedInequalityViolation);
    emit(r.plannerCost);
    out << ',' << r.plannerIterations << ',' << (r.fallback ? 1 : 0) << ','
        << (r.disturbanceActive ? 1 : 0);
    emit(r.plantConeViolation);
    out << '\n';
  }
}

}  // namespace wbmpc
