#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "riccati_oracle.hpp"
#include "toy_problems.hpp"
#include "wbmpc/solver/slq.hpp"

using namespace wbmpc;
using namespace wbmpc::test;

namespace {

OcpDefinition makeOcp(std::shared_ptr<const OcpProblem> problem, scalar_t T, scalar_t dt) {
  OcpDefinition ocp;
  ocp.problem = std::move(problem);
  ocp.modeSchedule = singleMode(0.0, T);
  ocp.dt = dt;
  return ocp;
}

}  // namespace

TEST_CASE("rollout: static system accumulates T * L(x0, u0)") {
  auto p = std::make_shared<ToyProblem>(1, 1, [](scalar_t, const vector_t&, const vector_t&) {
    return vector_t::Zero(1);
  });
  p->Q = matrix_t::Constant(1, 1, 3.0);
  p->xref = vector_t::Constant(1, 0.0);
  SlqSolver solver(makeOcp(p, 2.0, 0.1));
  const auto sol = solver.initialRollout(vector_t::Constant(1, 2.0));
  for (const auto& x : sol.states) {
    CHECK(x(0) == 2.0);
  }
  CHECK(sol.report.cost == doctest::Approx(2.0 * 3.0 * 4.0));  // T * x^T Q x
}

TEST_CASE("rollout: RK4 integrates xdot = -x to e^{-1}") {
  auto p = std::make_shared<ToyProblem>(1, 1, [](scalar_t, const vector_t& x, const vector_t&) {
    return vector_t(-x);
  });
  SlqSolver solver(makeOcp(p, 1.0, 0.01));
  const auto sol = solver.initialRollout(vector_t::Constant(1, 1.0));
  CHECK(std::abs(sol.states.back()(0) - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("rollout: diverging dynamics raise a diverged-rollout error with the failure time") {
  auto p = std::make_shared<ToyProblem>(1, 1, [](scalar_t, const vector_t& x, const vector_t&) {
    return vector_t(30.0 * x);
  });
  SlqSolver solver(makeOcp(p, 2.0, 0.01));
  try {
    solver.initialRollout(vector_t::Constant(1, 1.0));
    FAIL("expected divergence");
  } catch (const DivergedRolloutError& err) {
    CHECK(err.time > 0.0);
    CHECK(err.time <= 2.0);
  }
}

TEST_CASE("rollout: double integrator under the Riccati reference policy") {
  const scalar_t dt = 0.02, T = 2.0;
  const int N = static_cast<int>(T / dt);
  auto p = doubleIntegrator();
  p->Q = matrix_t::Identity(2, 2);
  p->R = matrix_t::Constant(1, 1, 1.0);
  p->Qf = matrix_t::Identity(2, 2);

  // Exact discrete maps of the double integrator (the RK4 series truncates).
  matrix_t Ad(2, 2), Bd(2, 1);
  Ad << 1.0, dt, 0.0, 1.0;
  Bd << 0.5 * dt * dt, dt;
  const auto gains = finiteHorizonRiccati(Ad, Bd, dt * p->Q, dt * p->R, p->Qf, N);

  // Reference trajectory from the recursion itself.
  const vector_t x0 = (vector_t(2) << 1.0, -0.5).finished();
  std::vector<vector_t> xRef{x0};
  std::vector<vector_t> uRef;
  for (int k = 0; k < N; ++k) {
    uRef.push_back(-gains[k] * xRef.back());
    xRef.push_back(Ad * xRef.back() + Bd * uRef.back());
  }

  // Roll the same policy through the solver's rollout.
  SolverSolution policy;
  policy.times.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    policy.times[k] = k * dt;
  }
  policy.states = xRef;
  policy.inputs = uRef;
  policy.modes.assign(N, ContactFlags{});
  for (int k = 0; k < N; ++k) {
    policy.gains.push_back(-gains[k]);
  }
  SlqSolver solver(makeOcp(p, T, dt));
  const auto rolled = solver.rolloutPolicy(x0, policy);
  for (int k = 0; k <= N; ++k) {
    CHECK((rolled.states[k] - xRef[k]).norm() < 1e-8);
  }
}

TEST_CASE("projection: fully determined input") {
  const auto proj = projectEqualities(matrix_t::Zero(2, 3), matrix_t::Identity(2, 2), vector_t::Zero(2));
  CHECK(proj.particular.norm() == 0.0);
  CHECK(proj.nullspace.cols() == 0);
  CHECK(proj.stateGain.norm() == 0.0);
}

TEST_CASE("projection: least-norm particular solution and orthonormal nullspace") {
  matrix_t D(1, 2);
  D << 1.0, 1.0;
  const auto proj = projectEqualities(matrix_t::Zero(1, 1), D, vector_t::Constant(1, -1.0));
  CHECK((proj.particular - vector_t::Constant(2, 0.5)).norm() < 1e-12);
  REQUIRE(proj.nullspace.cols() == 1);
  CHECK(std::abs(proj.nullspace.col(0).norm() - 1.0) < 1e-12);
  CHECK(std::abs(D.row(0).dot(proj.nullspace.col(0))) < 1e-12);
}

TEST_CASE("projection: random full-rank systems reconstruct feasible inputs") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<scalar_t> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 3, nu = 7, nx = 5;
    matrix_t C(m, nx), D(m, nu);
    vector_t e(m);
    for (int i = 0; i < m; ++i) {
      e(i) = u(rng);
      for (int j = 0; j < nx; ++j) {
        C(i, j) = u(rng);
      }
      for (int j = 0; j < nu; ++j) {
        D(i, j) = u(rng);
      }
    }
    const auto proj = projectEqualities(C, D, e);
    for (int s = 0; s < 5; ++s) {
      vector_t dx(nx), dun(nu - m);
      for (int j = 0; j < nx; ++j) {
        dx(j) = u(rng);
      }
      for (int j = 0; j < nu - m; ++j) {
        dun(j) = u(rng);
      }
      const vector_t du = proj.particular + proj.stateGain * dx + proj.nullspace * dun;
      CHECK((C * dx + D * du + e).norm() < 1e-12);
    }
  }
}

TEST_CASE("projection: rank-deficient input jacobian raises a constraint-rank error") {
  matrix_t D(2, 2);
  D << 1.0, 1.0, 2.0, 2.0;
  CHECK_THROWS_AS(projectEqualities(matrix_t::Zero(2, 1), D, vector_t::Zero(2)), ConstraintRankError);
}

TEST_CASE("backward pass: double-integrator gains match the converged Riccati solution") {
  const scalar_t dt = 0.02, T = 16.0;
  auto p = doubleIntegrator();
  p->Q = matrix_t::Identity(2, 2);
  p->R = matrix_t::Constant(1, 1, 1.0);
  p->Qf = matrix_t::Identity(2, 2);

  SlqSolver solver(makeOcp(p, T, dt));
  const auto sol = solver.solve((vector_t(2) << 1.0, 0.0).finished());
  REQUIRE(sol.report.converged);

  matrix_t Ad(2, 2), Bd(2, 1);
  Ad << 1.0, dt, 0.0, 1.0;
  Bd << 0.5 * dt * dt, dt;
  const auto dare = discreteRiccatiFixedPoint(Ad, Bd, dt * p->Q, dt * p->R);
  CHECK((sol.gains.front() + dare.K).norm() < 1e-8);
}

TEST_CASE("backward pass: zero cost gives the zero policy") {
  auto p = doubleIntegrator();
  p->Q.setZero();
  p->R.setZero();
  p->Qf.setZero();
  SlqSolver solver(makeOcp(p, 1.0, 0.05));
  const auto sol = solver.solve((vector_t(2) << 0.7, -0.3).finished());
  for (const auto& K : sol.gains) {
    CHECK(K.norm() == 0.0);
  }
  for (const auto& u : sol.inputs) {
    CHECK(u.norm() == 0.0);
  }
}

TEST_CASE("backward pass: one-step horizon equals the direct least-squares gain") {
  const scalar_t dt = 0.1;
  auto p = doubleIntegrator();
  p->Q = matrix_t::Identity(2, 2);
  p->R = matrix_t::Constant(1, 1, 0.5);
  p->Qf = 4.0 * matrix_t::Identity(2, 2);

  SlqSolver solver(makeOcp(p, dt, dt));
  const auto sol = solver.solve((vector_t(2) << 0.9, 0.4).finished());
  REQUIRE(sol.numSteps() == 1);

  matrix_t Ad(2, 2), Bd(2, 1);
  Ad << 1.0, dt, 0.0, 1.0;
  Bd << 0.5 * dt * dt, dt;
  // argmin_u dt u^T R u + (Ad x + Bd u)^T Qf (Ad x + Bd u)
  const matrix_t H = dt * p->R + Bd.transpose() * p->Qf * Bd;
  const matrix_t Kref = H.inverse() * Bd.transpose() * p->Qf * Ad;
  CHECK((sol.gains[0] + Kref).norm() < 1e-9);
}

TEST_CASE("inner loop: unconstrained LQR converges within two iterations") {
  const scalar_t dt = 0.02, T = 2.0;
  const int N = static_cast<int>(T / dt);
  auto p = doubleIntegrator();
  p->Q = matrix_t::Identity(2, 2);
  p->R = matrix_t::Constant(1, 1, 1.0);
  p->Qf = matrix_t::Identity(2, 2);
  SlqSolver solver(makeOcp(p, T, dt));
  const vector_t x0 = (vector_t(2) << 1.0, -0.5).finished();
  const auto sol = solver.solve(x0);
  REQUIRE(sol.report.converged);
  CHECK(sol.report.innerIterations <= 2);

  matrix_t Ad(2, 2), Bd(2, 1);
  Ad << 1.0, dt, 0.0, 1.0;
  Bd << 0.5 * dt * dt, dt;
  const auto gains = finiteHorizonRiccati(Ad, Bd, dt * p->Q, dt * p->R, p->Qf, N);
  vector_t x = x0;
  scalar_t worst = 0.0;
  for (int k = 0; k < N; ++k) {
    const vector_t uStar = -gains[k] * x;
    worst = std::max(worst, (sol.inputs[k] - uStar).cwiseAbs().maxCoeff());
    x = Ad * x + Bd * uStar;
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("inner loop: pendulum swing-up has a monotone merit history") {
  auto p = pendulumSwingUp();
  p->xref = (vector_t(2) << 0.0, 0.0).finished();
  SlqSolver solver(makeOcp(p, 3.0, 0.02));
  const auto sol = solver.solve((vector_t(2) << M_PI, 0.0).finished());
  REQUIRE(sol.report.meritHistory.size() > 2);
  for (std::size_t i = 1; i < sol.report.meritHistory.size(); ++i) {
    CHECK(sol.report.meritHistory[i] <= sol.report.meritHistory[i - 1] + 1e-12);
  }
  // The swing-up actually reaches the upright neighborhood.
  CHECK(std::abs(sol.states.back()(0)) < 0.1);
}

TEST_CASE("inner loop: projected equality reproduces the reduced LQR") {
  // Two inputs, only the first drives the plant; constraint u2 = -u1.
  const scalar_t dt = 0.02, T = 2.0;
  const int N = static_cast<int>(T / dt);
  auto p = std::make_shared<ToyProblem>(2, 2, [](scalar_t, const vector_t& x, const vector_t& u) {
    vector_t dx(2);
    dx << x(1), u(0);
    return dx;
  });
  p->setFlowJacobians([](scalar_t, const vector_t&, const vector_t&, matrix_t& A, matrix_t& B) {
    A = matrix_t::Zero(2, 2);
    A(0, 1) = 1.0;
    B = matrix_t::Zero(2, 2);
    B(1, 0) = 1.0;
  });
  p->Q = matrix_t::Identity(2, 2);
  p->R = matrix_t::Identity(2, 2);
  p->Qf = matrix_t::Identity(2, 2);
  p->Ce = matrix_t::Zero(1, 2);
  p->De = (matrix_t(1, 2) << 1.0, 1.0).finished();
  p->ce = vector_t::Zero(1);

  SlqSolver solver(makeOcp(p, T, dt));
  const vector_t x0 = (vector_t(2) << 1.0, 0.0).finished();
  const auto sol = solver.solve(x0);
  REQUIRE(sol.report.converged);

  // Reduced problem: single input with R = 2 (u2 = -u1 doubles the effort).
  matrix_t Ad(2, 2), Bd(2, 1);
  Ad << 1.0, dt, 0.0, 1.0;
  Bd << 0.5 * dt * dt, dt;
  const auto gains =
      finiteHorizonRiccati(Ad, Bd, dt * matrix_t::Identity(2, 2), dt * matrix_t::Constant(1, 1, 2.0),
                           matrix_t::Identity(2, 2), N);
  vector_t x = x0;
  for (int k = 0; k < N; ++k) {
    const vector_t uStar = -gains[k] * x;
    CHECK(std::abs(sol.inputs[k](0) - uStar(0)) < 1e-6);
    CHECK(std::abs(sol.inputs[k](1) + sol.inputs[k](0)) < 1e-10);
    x = Ad * x + Bd * uStar;
  }
}

TEST_CASE("al loop: inactive constraints keep zero multipliers and the unconstrained solution") {
  auto makeProblem = [](bool withConstraint) {
    auto p = doubleIntegrator();
    p->Q = matrix_t::Identity(2, 2);
    p->R = matrix_t::Constant(1, 1, 1.0);
    p->Qf = matrix_t::Identity(2, 2);
    if (withConstraint) {
      p->Ch = matrix_t::Zero(1, 2);
      p->Dh = matrix_t::Identity(1, 1);
      p->ch = vector_t::Constant(1, 100.0);  // u + 100 >= 0, never active
    }
    return p;
  };
  const vector_t x0 = (vector_t(2) << 1.0, -0.5).finished();
  SlqSolver unconstrained(makeOcp(makeProblem(false), 2.0, 0.02));
  SlqSolver constrained(makeOcp(makeProblem(true), 2.0, 0.02));
  const auto a = unconstrained.solve(x0);
  const auto b = constrained.solve(x0);
  REQUIRE(b.report.converged);
  for (const auto& lambda : b.multipliers) {
    CHECK(lambda.norm() == 0.0);
  }
  for (int k = 0; k < a.numSteps(); ++k) {
    CHECK((a.inputs[k] - b.inputs[k]).norm() < 1e-9);
  }
}

TEST_CASE("al loop: KKT point of min u^2 subject to u >= 1") {
  auto p = std::make_shared<ToyProblem>(1, 1, [](scalar_t, const vector_t&, const vector_t&) {
    return vector_t::Zero(1);
  });
  p->R = matrix_t::Identity(1, 1);
  p->Ch = matrix_t::Zero(1, 1);
  p->Dh = matrix_t::Identity(1, 1);
  p->ch = vector_t::Constant(1, -1.0);  // u - 1 >= 0

  AlSettings settings;
  settings.maxOuterIterations = 30;
  settings.violationTolerance = 1e-9;
  settings.innerTolerance = 1e-12;
  settings.feedforwardTolerance = 1e-12;
  SlqSolver solver(makeOcp(p, 0.5, 0.1), settings);
  const auto sol = solver.solve(vector_t::Zero(1));

  for (int k = 0; k < sol.numSteps(); ++k) {
    CHECK(sol.inputs[k](0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.multipliers[k](0) == doctest::Approx(2.0).epsilon(1e-4));
  }
  CHECK(sol.report.maxInequalityViolation < 1e-6);
}

TEST_CASE("al loop: smoothed friction cone on a force-redistribution toy") {
  // Two 3D forces share a fixed resultant; the lateral push activates the
  // cone, and the AL loop settles on a feasible redistribution.
  class ConeProblem : public ToyProblem {
   public:
    ConeProblem()
        : ToyProblem(1, 6, [](scalar_t, const vector_t&, const vector_t&) { return vector_t::Zero(1); }) {
      R = 0.01 * matrix_t::Identity(6, 6);
      Ce = matrix_t::Zero(3, 1);
      De = (matrix_t(3, 6) << 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1).finished();
      ce = -vector3_t(60.0, 0.0, 100.0);  // required resultant
    }
    vector_t inequalityResiduals(scalar_t, const vector_t&, const vector_t& u,
                                 const ContactFlags&) const override {
      vector_t h(2);
      for (int c = 0; c < 2; ++c) {
        const vector3_t f = u.segment<3>(3 * c);
        h(c) = mu * f.z() - std::sqrt(f.x() * f.x() + f.y() * f.y() + eps * eps);
      }
      return h;
    }
    LqNode linearizeNode(scalar_t t, const vector_t& x, const vector_t& u,
                         const ContactFlags& mode) const override {
      LqNode node = ToyProblem::linearizeNode(t, x, u, mode);
      InequalityBlock cone;
      cone.label = "cones";
      cone.residual = inequalityResiduals(t, x, u, mode);
      cone.dhdx = matrix_t::Zero(2, 1);
      cone.dhdu = matrix_t::Zero(2, 6);
      for (int c = 0; c < 2; ++c) {
        const vector3_t f = u.segment<3>(3 * c);
        const scalar_t s = std::sqrt(f.x() * f.x() + f.y() * f.y() + eps * eps);
        cone.dhdu(c, 3 * c + 0) = -f.x() / s;
        cone.dhdu(c, 3 * c + 1) = -f.y() / s;
        cone.dhdu(c, 3 * c + 2) = mu;
      }
      node.inequalities.push_back(std::move(cone));
      return node;
    }
    scalar_t mu = 0.7;
    scalar_t eps = 0.5;
  };

  auto p = std::make_shared<ConeProblem>();
  SlqSolver solver(makeOcp(p, 0.3, 0.1));
  const auto sol = solver.solve(vector_t::Zero(1));

  // The unconstrained least-effort split (30, 0, 50) per foot violates the
  // cone (0.7 * 50 < 30); at the solution every node is feasible.
  scalar_t worst = 0.0;
  for (int k = 0; k < sol.numSteps(); ++k) {
    const vector_t h = p->inequalityResiduals(0.0, sol.states[k], sol.inputs[k], ContactFlags{});
    worst = std::max(worst, std::max(0.0, -h.minCoeff()));
    CHECK(std::abs(sol.inputs[k].segment<3>(0).sum() + sol.inputs[k].segment<3>(3).sum() - 160.0) <
          1e-6);  // resultant held (x and z components sum to 60 + 100)
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("policy consistency: re-rolling the returned policy reproduces the trajectory") {
  auto p = pendulumSwingUp();
  SlqSolver solver(makeOcp(p, 2.0, 0.02));
  const vector_t x0 = (vector_t(2) << M_PI, 0.0).finished();
  const auto sol = solver.solve(x0);
  const auto replay = solver.rolloutPolicy(x0, sol);
  for (std::size_t k = 0; k < sol.states.size(); ++k) {
    CHECK(sol.states[k] == replay.states[k]);  // exact reproduction
  }
  for (std::size_t k = 0; k < sol.inputs.size(); ++k) {
    CHECK(sol.inputs[k] == replay.inputs[k]);
  }
}

TEST_CASE("multipliers stay nonnegative through every update") {
  auto p = std::make_shared<ToyProblem>(1, 1, [](scalar_t, const vector_t&, const vector_t&) {
    return vector_t::Zero(1);
  });
  p->R = matrix_t::Identity(1, 1);
  p->Ch = matrix_t::Zero(1, 1);
  p->Dh = matrix_t::Identity(1, 1);
  p->ch = vector_t::Constant(1, -1.0);
  SlqSolver solver(makeOcp(p, 0.5, 0.1));
  const auto sol = solver.solve(vector_t::Zero(1));
  for (const auto& lambda : sol.multipliers) {
    CHECK(lambda.minCoeff() >= 0.0);
  }
}
