#include "wbmpc/ocp/problem.hpp"

namespace wbmpc {

namespace {

scalar_t scaledStep(scalar_t eps, scalar_t v) { return eps * std::max(1.0, std::abs(v)); }

scalar_t blockError(const matrix_t& a, const matrix_t& b) {
  if (a.size() == 0 && b.size() == 0) {
    return 0.0;
  }
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

LqNode linearizeNodeFd(const OcpProblem& problem, scalar_t t, const vector_t& x, const vector_t& u,
                       const ContactFlags& mode, scalar_t eps) {
  const int nx = problem.stateDim();
  const int nu = problem.inputDim();
  LqNode node;
  node.dfdx.resize(nx, nx);
  node.dfdu.resize(nx, nu);
  node.cost.dfdx.resize(nx);
  node.cost.dfdu.resize(nu);

  const auto sampleX = [&](const vector_t& xx) { return problem.flow(t, xx, u, mode); };
  const auto sampleU = [&](const vector_t& uu) { return problem.flow(t, x, uu, mode); };

  for (int i = 0; i < nx; ++i) {
    const scalar_t h = scaledStep(eps, x(i));
    vector_t xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    node.dfdx.col(i) = (sampleX(xp) - sampleX(xm)) / (2.0 * h);
    node.cost.dfdx(i) =
        (problem.stageCost(t, xp, u, mode) - problem.stageCost(t, xm, u, mode)) / (2.0 * h);
  }
  for (int i = 0; i < nu; ++i) {
    const scalar_t h = scaledStep(eps, u(i));
    vector_t up = u, um = u;
    up(i) += h;
    um(i) -= h;
    node.dfdu.col(i) = (sampleU(up) - sampleU(um)) / (2.0 * h);
    node.cost.dfdu(i) =
        (problem.stageCost(t, x, up, mode) - problem.stageCost(t, x, um, mode)) / (2.0 * h);
  }

  // Constraint Jacobians on the stacked residuals.
  EqualityBlock eq;
  eq.residual = problem.equalityResiduals(t, x, u, mode);
  eq.dgdx.resize(eq.residual.size(), nx);
  eq.dgdu.resize(eq.residual.size(), nu);
  InequalityBlock ineq;
  ineq.residual = problem.inequalityResiduals(t, x, u, mode);
  ineq.dhdx.resize(ineq.residual.size(), nx);
  ineq.dhdu.resize(ineq.residual.size(), nu);
  for (int i = 0; i < nx; ++i) {
    const scalar_t h = scaledStep(eps, x(i));
    vector_t xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    if (eq.residual.size() > 0) {
      eq.dgdx.col(i) =
          (problem.equalityResiduals(t, xp, u, mode) - problem.equalityResiduals(t, xm, u, mode)) / (2.0 * h);
    }
    if (ineq.residual.size() > 0) {
      ineq.dhdx.col(i) =
          (problem.inequalityResiduals(t, xp, u, mode) - problem.inequalityResiduals(t, xm, u, mode)) /
          (2.0 * h);
    }
  }
  for (int i = 0; i < nu; ++i) {
    const scalar_t h = scaledStep(eps, u(i));
    vector_t up = u, um = u;
    up(i) += h;
    um(i) -= h;
    if (eq.residual.size() > 0) {
      eq.dgdu.col(i) =
          (problem.equalityResiduals(t, x, up, mode) - problem.equalityResiduals(t, x, um, mode)) / (2.0 * h);
    }
    if (ineq.residual.size() > 0) {
      ineq.dhdu.col(i) =
          (problem.inequalityResiduals(t, x, up, mode) - problem.inequalityResiduals(t, x, um, mode)) /
          (2.0 * h);
    }
  }
  if (eq.residual.size() > 0) {
    node.equalities.push_back(std::move(eq));
  }
  if (ineq.residual.size() > 0) {
    node.inequalities.push_back(std::move(ineq));
  }
  return node;
}

scalar_t compareLqNodes(const LqNode& node, const LqNode& fd) {
  scalar_t err = std::max(blockError(node.dfdx, fd.dfdx), blockError(node.dfdu, fd.dfdu));
  err = std::max(err, blockError(node.cost.dfdx.transpose(), fd.cost.dfdx.transpose()));
  err = std::max(err, blockError(node.cost.dfdu.transpose(), fd.cost.dfdu.transpose()));

  const auto stack = [](const auto& blocks, auto residualSel, auto xSel, auto uSel, matrix_t& X,
                        matrix_t& U) {
    int rows = 0;
    for (const auto& b : blocks) {
      rows += static_cast<int>(residualSel(b).size());
    }
    if (rows == 0) {
      return;
    }
    X.resize(rows, xSel(blocks.front()).cols());
    U.resize(rows, uSel(blocks.front()).cols());
    int at = 0;
    for (const auto& b : blocks) {
      X.middleRows(at, residualSel(b).size()) = xSel(b);
      U.middleRows(at, residualSel(b).size()) = uSel(b);
      at += static_cast<int>(residualSel(b).size());
    }
  };

  matrix_t eqX, eqU, fdEqX, fdEqU;
  stack(node.equalities, [](const auto& b) -> const vector_t& { return b.residual; },
        [](const auto& b) -> const matrix_t& { return b.dgdx; },
        [](const auto& b) -> const matrix_t& { return b.dgdu; }, eqX, eqU);
  stack(fd.equalities, [](const auto& b) -> const vector_t& { return b.residual; },
        [](const auto& b) -> const matrix_t& { return b.dgdx; },
        [](const auto& b) -> const matrix_t& { return b.dgdu; }, fdEqX, fdEqU);
  err = std::max(err, blockError(eqX, fdEqX));
  err = std::max(err, blockError(eqU, fdEqU));

  matrix_t inX, inU, fdInX, fdInU;
  stack(node.inequalities, [](const auto& b) -> const vector_t& { return b.residual; },
        [](const auto& b) -> const matrix_t& { return b.dhdx; },
        [](const auto& b) -> const matrix_t& { return b.dhdu; }, inX, inU);
  stack(fd.inequalities, [](const auto& b) -> const vector_t& { return b.residual; },
        [](const auto& b) -> const matrix_t& { return b.dhdx; },
        [](const auto& b) -> const matrix_t& { return b.dhdu; }, fdInX, fdInU);
  err = std::max(err, blockError(inX, fdInX));
  err = std::max(err, blockError(inU, fdInU));
  return err;
}

}  // namespace wbmpc
