#include "wbmpc/solver/slq.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Cholesky>

namespace wbmpc {

namespace {

/// RK4 discretization of the linearized dynamics (exact for an LTI step):
/// Ad = sum_{i<=4} (h A)^i / i!,  Bd = h * sum_{i<=3} (h A)^i / (i+1)! * B.
void discretizeLinearization(const matrix_t& A, const matrix_t& B, scalar_t h, matrix_t& Ad,
                             matrix_t& Bd) {
  const int nx = static_cast<int>(A.rows());
  const matrix_t hA = h * A;
  matrix_t term = matrix_t::Identity(nx, nx);
  Ad = term;
  matrix_t bSum = term;
  const scalar_t inv[] = {1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};
  for (int i = 1; i <= 4; ++i) {
    term = term * hA;
    Ad += term / std::tgamma(i + 1.0);
    if (i <= 3) {
      bSum += term * inv[i];
    }
  }
  Bd = h * bSum * B;
}

scalar_t infNorm(const std::vector<vector_t>& vecs) {
  scalar_t n = 0.0;
  for (const auto& v : vecs) {
    if (v.size() > 0) {
      n = std::max(n, v.cwiseAbs().maxCoeff());
    }
  }
  return n;
}

}  // namespace

int SolverSolution::intervalIndex(scalar_t t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const int idx = static_cast<int>(it - times.begin()) - 1;
  return std::clamp(idx, 0, numSteps() - 1);
}

vector_t SolverSolution::policyInput(scalar_t t, const vector_t& x) const {
  const int k = intervalIndex(t);
  return inputs[k] + gains[k] * (x - states[k]);
}

vector_t SolverSolution::stateAt(scalar_t t) const {
  if (t <= times.front()) {
    return states.front();
  }
  if (t >= times.back()) {
    return states.back();
  }
  const int k = intervalIndex(t);
  const scalar_t a = (t - times[k]) / (times[k + 1] - times[k]);
  return (1.0 - a) * states[k] + a * states[k + 1];
}

vector_t SolverSolution::inputAt(scalar_t t) const { return inputs[intervalIndex(t)]; }

SlqSolver::SlqSolver(OcpDefinition ocp, AlSettings settings)
    : ocp_(std::move(ocp)), settings_(settings) {
  if (!ocp_.problem) {
    throw std::invalid_argument("SlqSolver: missing problem");
  }
  if (!(ocp_.dt > 0.0)) {
    throw std::invalid_argument("SlqSolver: dt must be positive");
  }
}

SlqSolver::Grid SlqSolver::buildGrid() const {
  const auto& schedule = ocp_.modeSchedule;
  Grid grid;
  grid.times.push_back(schedule.startTime());
  for (std::size_t j = 0; j + 1 < schedule.switchingTimes().size(); ++j) {
    const scalar_t s0 = schedule.switchingTimes()[j];
    const scalar_t s1 = schedule.switchingTimes()[j + 1];
    const int steps = std::max(1, static_cast<int>(std::ceil((s1 - s0) / ocp_.dt - 1e-9)));
    for (int i = 1; i <= steps; ++i) {
      grid.times.push_back(s0 + (s1 - s0) * i / steps);
      grid.modes.push_back(schedule.modes()[j]);
    }
  }
  return grid;
}

SlqSolver::Trajectory SlqSolver::rollout(const Grid& grid, const vector_t& x0, const Trajectory* nominal,
                                         const std::vector<matrix_t>* gains,
                                         const std::vector<vector_t>* feedforward,
                                         scalar_t stepSize) const {
  const auto& problem = *ocp_.problem;
  const int N = static_cast<int>(grid.modes.size());
  Trajectory traj;
  traj.states.resize(N + 1);
  traj.inputs.resize(N);
  traj.states[0] = x0;

  for (int k = 0; k < N; ++k) {
    const scalar_t t = grid.times[k];
    const scalar_t h = grid.times[k + 1] - grid.times[k];
    const vector_t& x = traj.states[k];

    vector_t u;
    if (nominal == nullptr) {
      u = problem.initialInput(t, x, grid.modes[k]);
    } else {
      u = (*nominal).inputs[k];
      if (feedforward != nullptr) {
        u += stepSize * (*feedforward)[k];
      }
      if (gains != nullptr) {
        u += (*gains)[k] * (x - (*nominal).states[k]);
      }
    }
    traj.inputs[k] = u;

    const auto& mode = grid.modes[k];
    try {
      const vector_t k1 = problem.flow(t, x, u, mode);
      const vector_t k2 = problem.flow(t + 0.5 * h, x + 0.5 * h * k1, u, mode);
      const vector_t k3 = problem.flow(t + 0.5 * h, x + 0.5 * h * k2, u, mode);
      const vector_t k4 = problem.flow(t + h, x + h * k3, u, mode);
      traj.states[k + 1] = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const DivergedRolloutError&) {
      throw;
    } catch (const std::runtime_error&) {
      // Model-level failures (e.g. the Euler pitch guard) mean this rollout
      // left the valid state set.
      throw DivergedRolloutError(grid.times[k + 1]);
    }

    if (!traj.states[k + 1].allFinite() ||
        traj.states[k + 1].cwiseAbs().maxCoeff() > settings_.divergenceThreshold) {
      throw DivergedRolloutError(grid.times[k + 1]);
    }
  }
  return traj;
}

scalar_t SlqSolver::taskCost(const Grid& grid, const Trajectory& traj) const {
  const auto& problem = *ocp_.problem;
  scalar_t cost = 0.0;
  for (std::size_t k = 0; k < grid.modes.size(); ++k) {
    const scalar_t h = grid.times[k + 1] - grid.times[k];
    cost += h * problem.stageCost(grid.times[k], traj.states[k], traj.inputs[k], grid.modes[k]);
  }
  return cost + problem.terminalCost(traj.states.back());
}

SlqSolver::MeritValue SlqSolver::meritFunction(const Grid& grid, const Trajectory& traj,
                                               const std::vector<vector_t>& multipliers, scalar_t rho,
                                               scalar_t equalityPenalty) const {
  const auto& problem = *ocp_.problem;
  MeritValue value;
  value.merit = problem.terminalCost(traj.states.back());
  for (std::size_t k = 0; k < grid.modes.size(); ++k) {
    const scalar_t h = grid.times[k + 1] - grid.times[k];
    const auto pieces =
        problem.stagePieces(grid.times[k], traj.states[k], traj.inputs[k], grid.modes[k]);
    value.merit += h * pieces.cost;
    const vector_t& lambda = multipliers[k];
    for (int r = 0; r < pieces.inequalities.size(); ++r) {
      const scalar_t slack = std::max(0.0, lambda(r) - rho * pieces.inequalities(r));
      value.merit += h * (slack * slack - lambda(r) * lambda(r)) / (2.0 * rho);
    }
    if (pieces.inequalities.size() > 0) {
      value.maxInequality = std::max(value.maxInequality, std::max(0.0, -pieces.inequalities.minCoeff()));
    }
    if (pieces.equalities.size() > 0) {
      value.maxEquality = std::max(value.maxEquality, pieces.equalities.cwiseAbs().maxCoeff());
      if (equalityPenalty > 0.0) {
        value.merit += h * equalityPenalty * pieces.equalities.squaredNorm();
      }
    }
  }
  return value;
}

std::vector<LqNode> SlqSolver::linearizeTrajectory(const Grid& grid, const Trajectory& traj,
                                                   scalar_t* derivativeError) const {
  const auto& problem = *ocp_.problem;
  std::vector<LqNode> nodes(grid.modes.size());
  for (std::size_t k = 0; k < grid.modes.size(); ++k) {
    nodes[k] = problem.linearizeNode(grid.times[k], traj.states[k], traj.inputs[k], grid.modes[k]);
    if (settings_.verifyDerivatives && derivativeError != nullptr) {
      const LqNode fd =
          linearizeNodeFd(problem, grid.times[k], traj.states[k], traj.inputs[k], grid.modes[k]);
      *derivativeError = std::max(*derivativeError, compareLqNodes(nodes[k], fd));
    }
  }
  return nodes;
}

struct SlqSolver::ProjectedLq {
  matrix_t Ad;      // reduced: Ad + Bd * stateGain
  matrix_t Bd;      // reduced: Bd * nullspace
  vector_t drift;   // Bd * particular
  vector_t lx;
  matrix_t lxx;
  vector_t lu;      // reduced input space
  matrix_t luu;
  matrix_t lux;
  scalar_t lconst = 0.0;
  EqualityProjection proj;
};

std::vector<SlqSolver::ProjectedLq> SlqSolver::projectAndAugment(
    const Grid& grid, const Trajectory& traj, const std::vector<LqNode>& nodes,
    const std::vector<vector_t>& multipliers, scalar_t rho, scalar_t equalityPenalty) const {
  const int nx = ocp_.problem->stateDim();
  const int nu = ocp_.problem->inputDim();
  std::vector<ProjectedLq> out(nodes.size());

  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const LqNode& node = nodes[k];
    const scalar_t h = grid.times[k + 1] - grid.times[k];

    // Quadrature-scaled cost expansion.
    vector_t lx = h * node.cost.dfdx;
    vector_t lu = h * node.cost.dfdu;
    matrix_t lxx = h * node.cost.dfdxx;
    matrix_t luu = h * node.cost.dfduu;
    matrix_t lux = h * node.cost.dfdux;
    scalar_t lconst = 0.0;

    // Augmented-Lagrangian terms of the inequalities: exact gradient on the
    // active rows, Gauss-Newton curvature also on rows whose multiplier is
    // positive (they sit near the activity boundary, and trial steps would
    // otherwise pick up unmodeled rho-scale penalty).
    int row = 0;
    for (const auto& b : node.inequalities) {
      for (int r = 0; r < b.residual.size(); ++r, ++row) {
        const scalar_t lambda = multipliers[k](row);
        const scalar_t slack = lambda - rho * b.residual(r);
        if (slack > 0.0 || lambda > 0.0) {
          const vector_t hx = b.dhdx.row(r).transpose();
          const vector_t hu = b.dhdu.row(r).transpose();
          if (slack > 0.0) {
            lx -= h * slack * hx;
            lu -= h * slack * hu;
          }
          lxx += h * rho * hx * hx.transpose();
          luu += h * rho * hu * hu.transpose();
          lux += h * rho * hu * hx.transpose();
        }
      }
    }

    // Stack the input-involved equalities for projection; penalize all of
    // them quadratically in the model as in the merit.
    int eqRows = 0;
    for (const auto& b : node.equalities) {
      if (b.inputInvolved) {
        eqRows += static_cast<int>(b.residual.size());
      }
    }
    matrix_t C = matrix_t::Zero(eqRows, nx);
    matrix_t D = matrix_t::Zero(eqRows, nu);
    vector_t e = vector_t::Zero(eqRows);
    int at = 0;
    for (const auto& b : node.equalities) {
      const scalar_t nu_pen = equalityPenalty;
      if (nu_pen > 0.0 && b.residual.size() > 0) {
        lx += h * 2.0 * nu_pen * b.dgdx.transpose() * b.residual;
        lu += h * 2.0 * nu_pen * b.dgdu.transpose() * b.residual;
        lxx += h * 2.0 * nu_pen * b.dgdx.transpose() * b.dgdx;
        luu += h * 2.0 * nu_pen * b.dgdu.transpose() * b.dgdu;
        lux += h * 2.0 * nu_pen * b.dgdu.transpose() * b.dgdx;
      }
      if (!b.inputInvolved) {
        continue;
      }
      C.middleRows(at, b.residual.size()) = b.dgdx;
      D.middleRows(at, b.residual.size()) = b.dgdu;
      e.segment(at, b.residual.size()) = b.residual;
      at += static_cast<int>(b.residual.size());
    }

    ProjectedLq& p = out[k];
    p.proj = projectEqualities(C, D, e, settings_.constraintRankTolerance,
                               "t = " + std::to_string(grid.times[k]) + ", mode " +
                                   toString(grid.modes[k]));

    matrix_t Ad, Bd;
    discretizeLinearization(node.dfdx, node.dfdu, h, Ad, Bd);

    const matrix_t& P = p.proj.stateGain;
    const matrix_t& N = p.proj.nullspace;
    const vector_t& part = p.proj.particular;

    p.Ad = Ad + Bd * P;
    p.Bd = Bd * N;
    p.drift = Bd * part;
    p.lconst = lconst + lu.dot(part) + 0.5 * part.dot(luu * part);
    p.lx = lx + P.transpose() * (lu + luu * part) + lux.transpose() * part;
    p.lu = N.transpose() * (lu + luu * part);
    p.lxx = lxx + P.transpose() * lux + lux.transpose() * P + P.transpose() * luu * P;
    p.luu = N.transpose() * luu * N;
    p.lux = N.transpose() * (lux + luu * P);
  }
  return out;
}

struct SlqSolver::BackwardPassResult {
  std::vector<matrix_t> gains;        // full input space
  std::vector<vector_t> feedforward;  // full input space
  scalar_t predictedChange = 0.0;     // value-function constant at the initial node
};

SlqSolver::BackwardPassResult SlqSolver::backwardPass(const Grid& grid, const Trajectory& traj,
                                                      const std::vector<ProjectedLq>& lq) const {
  const int N = static_cast<int>(lq.size());
  const int nx = ocp_.problem->stateDim();

  BackwardPassResult result;
  result.gains.resize(N);
  result.feedforward.resize(N);

  scalar_t reg = settings_.initialRegularization;
  while (true) {
    const CostQuadratics terminal = ocp_.problem->terminalQuadratics(traj.states.back());
    matrix_t S = terminal.dfdxx;
    vector_t s = terminal.dfdx;
    scalar_t v = 0.0;  // value-function constant relative to the nominal cost

    bool failed = false;
    for (int k = N - 1; k >= 0; --k) {
      const ProjectedLq& p = lq[k];
      const vector_t sc = s + S * p.drift;
      const scalar_t Qconst =
          v + p.lconst + s.dot(p.drift) + 0.5 * p.drift.dot(S * p.drift);
      const vector_t Qx = p.lx + p.Ad.transpose() * sc;
      const vector_t Qu = p.lu + p.Bd.transpose() * sc;
      const matrix_t SA = S * p.Ad;
      const matrix_t Qxx = p.lxx + p.Ad.transpose() * SA;
      matrix_t Quu = p.luu + p.Bd.transpose() * S * p.Bd;
      const matrix_t Qux = p.lux + p.Bd.transpose() * SA;

      const int nuRed = static_cast<int>(Quu.rows());
      vector_t kff = vector_t::Zero(nuRed);
      matrix_t K = matrix_t::Zero(nuRed, nx);
      if (nuRed > 0) {
        Quu.diagonal().array() += reg;
        Eigen::LLT<matrix_t> llt(Quu);
        if (llt.info() != Eigen::Success) {
          failed = true;
          break;
        }
        kff = -llt.solve(Qu);
        K = -llt.solve(Qux);
        v = Qconst + kff.dot(Qu) + 0.5 * kff.dot(Quu * kff);

        S = Qxx + K.transpose() * Quu * K + K.transpose() * Qux + Qux.transpose() * K;
        s = Qx + K.transpose() * Quu * kff + K.transpose() * Qu + Qux.transpose() * kff;
      } else {
        v = Qconst;
        S = Qxx;
        s = Qx;
      }
      S = 0.5 * (S + S.transpose());
      if (!S.allFinite() || !s.allFinite()) {
        failed = true;
        break;
      }

      // Lift the reduced policy back through the projection.
      result.feedforward[k] = p.proj.particular + p.proj.nullspace * kff;
      result.gains[k] = p.proj.stateGain + p.proj.nullspace * K;
    }

    if (!failed) {
      result.predictedChange = v;
      return result;
    }
    reg = reg == 0.0 ? 1e-8 : reg * settings_.regularizationGrowth;
    if (reg > settings_.maxRegularization) {
      throw SolverFailureError("backward pass failed: value function not positive definite after "
                               "maximum regularization");
    }
  }
}

SolverSolution SlqSolver::initialRollout(const vector_t& x0) const {
  const Grid grid = buildGrid();
  const Trajectory traj = rollout(grid, x0, nullptr, nullptr, nullptr, 0.0);
  SolverSolution sol;
  sol.times = grid.times;
  sol.states = traj.states;
  sol.inputs = traj.inputs;
  sol.modes = grid.modes;
  sol.gains.assign(grid.modes.size(),
                   matrix_t::Zero(ocp_.problem->inputDim(), ocp_.problem->stateDim()));
  sol.multipliers.resize(grid.modes.size());
  for (std::size_t k = 0; k < grid.modes.size(); ++k) {
    sol.multipliers[k] = vector_t::Zero(
        ocp_.problem->inequalityResiduals(grid.times[k], traj.states[k], traj.inputs[k], grid.modes[k])
            .size());
  }
  sol.report.cost = taskCost(grid, traj);
  return sol;
}

SolverSolution SlqSolver::rolloutPolicy(const vector_t& x0, const SolverSolution& policy) const {
  Grid grid;
  grid.times = policy.times;
  grid.modes = policy.modes;
  Trajectory nominal{policy.states, policy.inputs};
  const Trajectory traj = rollout(grid, x0, &nominal, &policy.gains, nullptr, 0.0);
  SolverSolution sol = policy;
  sol.states = traj.states;
  sol.inputs = traj.inputs;
  return sol;
}

SolverSolution SlqSolver::solve(const vector_t& x0) {
  return solve(x0, nullptr, settings_.maxInnerIterations, settings_.maxOuterIterations);
}

SolverSolution SlqSolver::solve(const vector_t& x0, const SolverSolution* warmStart, int maxInner,
                                int maxOuter) {
  const auto tic = std::chrono::steady_clock::now();
  const Grid grid = buildGrid();
  const int N = static_cast<int>(grid.modes.size());
  const auto& problem = *ocp_.problem;

  ConvergenceReport report;
  report.penalty = settings_.initialPenalty;

  // Initial trajectory: roll the warm-start policy out on the new grid, or
  // bootstrap from the problem's initializer.
  Trajectory traj;
  try {
    if (warmStart != nullptr && !warmStart->empty()) {
      Trajectory nominal;
      nominal.states.resize(N + 1);
      nominal.inputs.resize(N);
      std::vector<matrix_t> gains(N);
      for (int k = 0; k < N; ++k) {
        nominal.states[k] = warmStart->stateAt(grid.times[k]);
        const int j = warmStart->intervalIndex(grid.times[k]);
        if (warmStart->modes[j] == grid.modes[k]) {
          nominal.inputs[k] = warmStart->inputAt(grid.times[k]);
          gains[k] = warmStart->gains[j];
        } else {
          // Freshly revealed mode segment: bootstrap from the initializer
          // rather than dragging the previous mode's contact forces in.
          nominal.inputs[k] = problem.initialInput(grid.times[k], nominal.states[k], grid.modes[k]);
          gains[k] = matrix_t::Zero(problem.inputDim(), problem.stateDim());
        }
      }
      nominal.states[N] = warmStart->stateAt(grid.times[N]);
      traj = rollout(grid, x0, &nominal, &gains, nullptr, 0.0);
      report.penalty = std::max(settings_.initialPenalty, warmStart->report.penalty);
    } else {
      traj = rollout(grid, x0, nullptr, nullptr, nullptr, 0.0);
    }
  } catch (const DivergedRolloutError& err) {
    SolverSolution sol;
    sol.report.failure = err.what();
    sol.report.converged = false;
    return sol;
  }

  // Multipliers: warm-started when the node structure matches, zero otherwise.
  std::vector<vector_t> multipliers(N);
  for (int k = 0; k < N; ++k) {
    const int rows = static_cast<int>(
        problem.inequalityResiduals(grid.times[k], traj.states[k], traj.inputs[k], grid.modes[k]).size());
    multipliers[k] = vector_t::Zero(rows);
    if (warmStart != nullptr && !warmStart->empty()) {
      const int j = warmStart->intervalIndex(grid.times[k]);
      if (warmStart->multipliers[j].size() == rows) {
        multipliers[k] = warmStart->multipliers[j];
      }
    }
  }

  scalar_t rho = report.penalty;
  scalar_t nu = settings_.equalityPenalty;
  std::vector<matrix_t> lastGains(N, matrix_t::Zero(problem.inputDim(), problem.stateDim()));
  scalar_t prevViolation = std::numeric_limits<scalar_t>::infinity();
  bool innerConverged = false;
  bool converged = false;

  maxInner = std::max(1, maxInner);
  maxOuter = std::max(1, maxOuter);

  for (int outer = 0; outer < maxOuter && !converged; ++outer) {
    ++report.outerIterations;
    innerConverged = false;
    MeritValue merit = meritFunction(grid, traj, multipliers, rho, nu);
    report.meritHistory.push_back(merit.merit);

    for (int inner = 0; inner < maxInner; ++inner) {
      ++report.innerIterations;
      std::vector<LqNode> nodes;
      std::vector<ProjectedLq> lq;
      BackwardPassResult bp;
      try {
        nodes = linearizeTrajectory(grid, traj, &report.maxDerivativeError);
        lq = projectAndAugment(grid, traj, nodes, multipliers, rho, nu);
        bp = backwardPass(grid, traj, lq);
      } catch (const std::runtime_error& err) {
        report.failure = err.what();
        break;
      }
      lastGains = bp.gains;

      // The LQ model's full-step merit change; near the optimum it vanishes.
      // The first iteration after a multiplier update always attempts a step,
      // and equality feasibility is part of inner convergence.
      const bool equalitiesOk = merit.maxEquality < settings_.equalityTolerance;
      if (infNorm(bp.feedforward) < settings_.feedforwardTolerance ||
          (inner > 0 && equalitiesOk &&
           std::abs(bp.predictedChange) <
               settings_.innerTolerance * std::max(1.0, std::abs(merit.merit)))) {
        innerConverged = true;
        break;
      }

      // Armijo backtracking on the AL merit.
      bool accepted = false;
      scalar_t alpha = 1.0;
      while (alpha >= settings_.minStepSize) {
        Trajectory trial;
        try {
          trial = rollout(grid, x0, &traj, &bp.gains, &bp.feedforward, alpha);
        } catch (const DivergedRolloutError&) {
          alpha *= settings_.stepShrink;
          continue;
        }
        const MeritValue trialMerit = meritFunction(grid, trial, multipliers, rho, nu);
        const scalar_t model = alpha * bp.predictedChange;
        const bool armijo = model < 0.0
                                ? (trialMerit.merit <= merit.merit + settings_.armijoFactor * model)
                                : (trialMerit.merit < merit.merit);
        if (std::getenv("WBMPC_DEBUG_LS") != nullptr) {
          std::fprintf(stderr, "[ls] alpha=%g merit=%.9f trial=%.9f model=%g accept=%d\n", alpha,
                       merit.merit, trialMerit.merit, model, armijo ? 1 : 0);
        }
        if (armijo) {
          const scalar_t decrease = merit.merit - trialMerit.merit;
          traj = std::move(trial);
          merit = trialMerit;
          report.meritHistory.push_back(merit.merit);
          accepted = true;
          if (decrease < settings_.innerTolerance * std::max(1.0, std::abs(merit.merit)) &&
              merit.maxEquality < settings_.equalityTolerance) {
            innerConverged = true;
          }
          break;
        }
        alpha *= settings_.stepShrink;
      }

      if (!accepted) {
        // Stalled while equality-infeasible: the merit underprices the
        // equalities, so stiffen the penalty and retry within this outer
        // iteration. Otherwise the iterate is at the model's floor.
        if (merit.maxEquality >= settings_.equalityTolerance && settings_.equalityPenalty > 0.0 &&
            nu < settings_.maxEqualityPenalty) {
          nu *= 10.0;
          merit = meritFunction(grid, traj, multipliers, rho, nu);
          report.meritHistory.push_back(merit.merit);
          continue;
        }
        innerConverged = true;
        break;
      }
      if (innerConverged) {
        break;
      }
    }
    report.meritValue = merit.merit;

    // Multiplier update and violation bookkeeping.
    scalar_t maxViolation = 0.0;
    for (int k = 0; k < N; ++k) {
      const vector_t hk =
          problem.inequalityResiduals(grid.times[k], traj.states[k], traj.inputs[k], grid.modes[k]);
      if (hk.size() > 0) {
        maxViolation = std::max(maxViolation, std::max(0.0, -hk.minCoeff()));
        multipliers[k] = (multipliers[k] - rho * hk).cwiseMax(0.0);
      }
    }
    report.maxInequalityViolation = maxViolation;
    report.violationHistory.push_back(maxViolation);

    if (maxViolation < settings_.violationTolerance && innerConverged &&
        merit.maxEquality < settings_.equalityTolerance) {
      converged = true;
    } else if (outer + 1 < maxOuter) {
      if (maxViolation > prevViolation / 4.0) {
        rho = std::min(rho * settings_.penaltyGrowth, settings_.maxPenalty);
      }
      prevViolation = maxViolation;
    }
    if (!report.failure.empty()) {
      break;
    }
  }

  report.converged = converged && report.failure.empty();
  report.penalty = rho;
  report.cost = taskCost(grid, traj);
  scalar_t maxEq = 0.0;
  for (int k = 0; k < N; ++k) {
    const vector_t e =
        problem.equalityResiduals(grid.times[k], traj.states[k], traj.inputs[k], grid.modes[k]);
    if (e.size() > 0) {
      maxEq = std::max(maxEq, e.cwiseAbs().maxCoeff());
    }
  }
  report.maxEqualityResidual = maxEq;
  report.solveTimeMs =
      std::chrono::duration<scalar_t, std::milli>(std::chrono::steady_clock::now() - tic).count();

  SolverSolution sol;
  sol.times = grid.times;
  sol.states = traj.states;
  sol.inputs = traj.inputs;
  sol.gains = lastGains;
  sol.modes = grid.modes;
  sol.multipliers = multipliers;
  sol.report = report;
  return sol;
}

}  // namespace wbmpc
