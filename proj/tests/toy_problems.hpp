#pragma once

// Small hand-specified optimal control problems for the solver tests.

#include <functional>
#include <utility>

#include "wbmpc/ocp/problem.hpp"

namespace wbmpc::test {

/// Quadratic-cost problem with user-supplied dynamics and optional affine
/// constraints: cost = (x - xref)^T Q (x - xref) + u^T R u, equalities
/// Ce x + De u + ce = 0, inequalities Ch x + Dh u + ch >= 0.
class ToyProblem : public OcpProblem {
 public:
  using FlowFn = std::function<vector_t(scalar_t, const vector_t&, const vector_t&)>;
  using FlowJacFn = std::function<void(scalar_t, const vector_t&, const vector_t&, matrix_t&, matrix_t&)>;

  ToyProblem(int nx, int nu, FlowFn flow) : nx_(nx), nu_(nu), flow_(std::move(flow)) {
    Q = matrix_t::Zero(nx, nx);
    R = matrix_t::Identity(nu, nu);
    Qf = matrix_t::Zero(nx, nx);
    xref = vector_t::Zero(nx);
  }

  int stateDim() const override { return nx_; }
  int inputDim() const override { return nu_; }

  vector_t flow(scalar_t t, const vector_t& x, const vector_t& u, const ContactFlags&) const override {
    return flow_(t, x, u);
  }

  scalar_t stageCost(scalar_t, const vector_t& x, const vector_t& u, const ContactFlags&) const override {
    const vector_t dx = x - xref;
    return dx.dot(Q * dx) + u.dot(R * u);
  }

  scalar_t terminalCost(const vector_t& x) const override {
    const vector_t dx = x - xref;
    return dx.dot(Qf * dx);
  }

  CostQuadratics terminalQuadratics(const vector_t& x) const override {
    CostQuadratics q;
    q.value = terminalCost(x);
    q.dfdx = 2.0 * Qf * (x - xref);
    q.dfdxx = 2.0 * Qf;
    return q;
  }

  LqNode linearizeNode(scalar_t t, const vector_t& x, const vector_t& u,
                       const ContactFlags& mode) const override {
    LqNode node;
    if (flowJac_) {
      flowJac_(t, x, u, node.dfdx, node.dfdu);
    } else {
      const LqNode fd = linearizeNodeFd(*this, t, x, u, mode);
      node.dfdx = fd.dfdx;
      node.dfdu = fd.dfdu;
    }
    node.cost.value = stageCost(t, x, u, mode);
    node.cost.dfdx = 2.0 * Q * (x - xref);
    node.cost.dfdxx = 2.0 * Q;
    node.cost.dfdu = 2.0 * R * u;
    node.cost.dfduu = 2.0 * R;
    node.cost.dfdux = matrix_t::Zero(nu_, nx_);

    if (Ce.size() > 0) {
      EqualityBlock eq;
      eq.label = "toy/equality";
      eq.residual = Ce * x + De * u + ce;
      eq.dgdx = Ce;
      eq.dgdu = De;
      node.equalities.push_back(std::move(eq));
    }
    if (Ch.size() > 0) {
      InequalityBlock in;
      in.label = "toy/inequality";
      in.residual = Ch * x + Dh * u + ch;
      in.dhdx = Ch;
      in.dhdu = Dh;
      node.inequalities.push_back(std::move(in));
    }
    return node;
  }

  vector_t inequalityResiduals(scalar_t, const vector_t& x, const vector_t& u,
                               const ContactFlags&) const override {
    if (Ch.size() == 0) {
      return vector_t();
    }
    return Ch * x + Dh * u + ch;
  }

  vector_t equalityResiduals(scalar_t, const vector_t& x, const vector_t& u,
                             const ContactFlags&) const override {
    if (Ce.size() == 0) {
      return vector_t();
    }
    return Ce * x + De * u + ce;
  }

  void setFlowJacobians(FlowJacFn fn) { flowJac_ = std::move(fn); }

  matrix_t Q, R, Qf;
  vector_t xref;
  matrix_t Ce, De;
  vector_t ce;
  matrix_t Ch, Dh;
  vector_t ch;

 private:
  int nx_, nu_;
  FlowFn flow_;
  FlowJacFn flowJac_;
};

inline ModeSchedule singleMode(scalar_t t0, scalar_t t1) {
  return ModeSchedule({t0, t1}, {ContactFlags{}});
}

/// Double integrator xdot = (v, u).
inline std::shared_ptr<ToyProblem> doubleIntegrator() {
  auto p = std::make_shared<ToyProblem>(2, 1, [](scalar_t, const vector_t& x, const vector_t& u) {
    vector_t dx(2);
    dx << x(1), u(0);
    return dx;
  });
  p->setFlowJacobians([](scalar_t, const vector_t&, const vector_t&, matrix_t& A, matrix_t& B) {
    A = matrix_t::Zero(2, 2);
    A(0, 1) = 1.0;
    B = matrix_t::Zero(2, 1);
    B(1, 0) = 1.0;
  });
  return p;
}

/// Pendulum with torque input, upright target at theta = 0 from hanging
/// theta = pi: xdot = (omega, -(g/l) sin(theta) + u / (m l^2)).
inline std::shared_ptr<ToyProblem> pendulumSwingUp() {
  const scalar_t g = 9.81, l = 0.6, m = 1.2;
  auto p = std::make_shared<ToyProblem>(2, 1, [=](scalar_t, const vector_t& x, const vector_t& u) {
    vector_t dx(2);
    dx << x(1), -(g / l) * std::sin(x(0)) + u(0) / (m * l * l);
    return dx;
  });
  p->setFlowJacobians([=](scalar_t, const vector_t& x, const vector_t&, matrix_t& A, matrix_t& B) {
    A = matrix_t::Zero(2, 2);
    A(0, 1) = 1.0;
    A(1, 0) = -(g / l) * std::cos(x(0));
    B = matrix_t::Zero(2, 1);
    B(1, 0) = 1.0 / (m * l * l);
  });
  p->Q = vector_t::Constant(2, 1.0).asDiagonal();
  p->Q(1, 1) = 0.1;
  p->R = matrix_t::Constant(1, 1, 0.01);
  p->Qf = vector_t::Constant(2, 50.0).asDiagonal();
  return p;
}

}  // namespace wbmpc::test
