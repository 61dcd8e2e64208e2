#pragma once

#include "types.hpp"

namespace gda::optim {

/// Standard-form convex quadratic program:
///   minimize 1/2 x^T P x + c^T x
///   subject to  Aeq x = beq,  Aineq x <= bineq,  lb <= x <= ub.
/// P must be symmetric (to 1e-10) and PSD up to tolerance. Empty matrices /
/// vectors mean "no constraints of that kind"; lb/ub entries may be +-inf.
struct QPProblem {
  MatrixXd p;
  VectorXd c;
  MatrixXd aeq;    // e x v
  VectorXd beq;    // e
  MatrixXd aineq;  // i x v
  VectorXd bineq;  // i
  VectorXd lb;     // v or empty
  VectorXd ub;     // v or empty

  Index vars() const { return c.size(); }
};

enum class SolveStatus { Optimal, MaxIter, Infeasible };

struct SolveReport {
  VectorXd x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
  double kkt_residual = 0.0;
  int iterations = 0;
  VectorXd eq_multipliers;    // e
  VectorXd ineq_multipliers;  // i (>= 0)
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 10000;
};

/// Dense convex QP solve. Small problems go through a Goldfarb-Idnani dual
/// active-set method (pivot ties broken by lowest constraint index); larger
/// or misbehaving instances fall back to an ADMM splitting with a terminal
/// polish. status == Optimal guarantees kkt_residual <= tol.
SolveReport solve_qp(const QPProblem& p, const SolveOptions& opts = {});

/// Euclidean projection onto the probability simplex {q >= 0, sum q = 1}.
VectorXd project_simplex(const VectorXd& v);

/// Max of stationarity, feasibility and complementarity residuals at (x, mults).
double kkt_residual(const QPProblem& p, const VectorXd& x, const VectorXd& eq_mult,
                    const VectorXd& ineq_mult, const VectorXd& lb_mult,
                    const VectorXd& ub_mult);

}  // namespace gda::optim
