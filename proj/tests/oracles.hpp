// Test-side oracles, kept independent of the implementation paths they check.
#pragma once

#include "qp.hpp"
#include "rng.hpp"
#include "types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace oracles {

using gda::Index;
using gda::MatrixXd;
using gda::VectorXd;

// Brute-force convex-QP oracle: enumerate every subset of inequality rows as
// the active set, solve the equality-constrained KKT system, and keep the
// best point that is primal feasible with nonnegative multipliers.
inline double qp_enumeration(const gda::optim::QPProblem& p, VectorXd* argbest = nullptr,
                             double feas_tol = 1e-7) {
  const Index v = p.vars();
  std::vector<Eigen::RowVectorXd> ineq_rows;
  std::vector<double> ineq_rhs;
  for (Index i = 0; i < p.aineq.rows(); ++i) {
    ineq_rows.push_back(p.aineq.row(i));
    ineq_rhs.push_back(p.bineq[i]);
  }
  for (Index i = 0; i < p.lb.size(); ++i) {
    if (p.lb[i] == -std::numeric_limits<double>::infinity()) continue;
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(v);
    r[i] = -1.0;
    ineq_rows.push_back(r);
    ineq_rhs.push_back(-p.lb[i]);
  }
  for (Index i = 0; i < p.ub.size(); ++i) {
    if (p.ub[i] == std::numeric_limits<double>::infinity()) continue;
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(v);
    r[i] = 1.0;
    ineq_rows.push_back(r);
    ineq_rhs.push_back(p.ub[i]);
  }
  const int ni = static_cast<int>(ineq_rows.size());
  const Index e = p.aeq.rows();
  double best = std::numeric_limits<double>::infinity();

  for (long mask = 0; mask < (1L << ni); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < ni; ++i)
      if (mask & (1L << i)) act.push_back(i);
    const Index na = e + static_cast<Index>(act.size());
    MatrixXd kkt(v + na, v + na);
    kkt.setZero();
    kkt.topLeftCorner(v, v) = p.p;
    VectorXd rhs(v + na);
    rhs.head(v) = -p.c;
    for (Index i = 0; i < e; ++i) {
      kkt.block(v + i, 0, 1, v) = p.aeq.row(i);
      kkt.block(0, v + i, v, 1) = p.aeq.row(i).transpose();
      rhs[v + i] = p.beq[i];
    }
    for (size_t i = 0; i < act.size(); ++i) {
      const Index r = v + e + static_cast<Index>(i);
      kkt.block(r, 0, 1, v) = ineq_rows[static_cast<size_t>(act[i])];
      kkt.block(0, r, v, 1) = ineq_rows[static_cast<size_t>(act[i])].transpose();
      rhs[r] = ineq_rhs[static_cast<size_t>(act[i])];
    }
    const VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    if ((kkt * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
    const VectorXd x = sol.head(v);
    bool feasible = true;
    for (int i = 0; i < ni && feasible; ++i)
      if (ineq_rows[static_cast<size_t>(i)].dot(x) >
          ineq_rhs[static_cast<size_t>(i)] + feas_tol)
        feasible = false;
    if (e > 0 && (p.aeq * x - p.beq).cwiseAbs().maxCoeff() > feas_tol) feasible = false;
    if (!feasible) continue;
    bool mult_ok = true;
    for (size_t i = 0; i < act.size() && mult_ok; ++i)
      if (sol[v + e + static_cast<Index>(i)] < -1e-7) mult_ok = false;
    if (!mult_ok) continue;
    const double obj = 0.5 * x.dot(p.p * x) + p.c.dot(x);
    if (obj < best) {
      best = obj;
      if (argbest) *argbest = x;
    }
  }
  return best;
}

// Global maximum of a smooth function over the unit sphere by multi-start
// projected gradient ascent (numeric gradient), for spheres of dimension <= 4.
template <typename F>
double sphere_max(const F& f, Index dim, int starts, gda::Rng& rng) {
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    VectorXd w(dim);
    for (Index i = 0; i < dim; ++i) w[i] = rng.gaussian(0.0, 1.0);
    if (w.norm() < 1e-12) continue;
    w.normalize();
    double step = 0.5;
    double fv = f(w);
    for (int it = 0; it < 400; ++it) {
      VectorXd grad(dim);
      const double h = 1e-6;
      for (Index i = 0; i < dim; ++i) {
        VectorXd wp = w, wm = w;
        wp[i] += h;
        wm[i] -= h;
        grad[i] = (f(VectorXd(wp.normalized())) - f(VectorXd(wm.normalized()))) /
                  (2.0 * h);
      }
      bool moved = false;
      for (int bt = 0; bt < 30; ++bt) {
        VectorXd w2 = (w + step * grad).normalized();
        const double f2 = f(w2);
        if (f2 > fv + 1e-14) {
          w = w2;
          fv = f2;
          moved = true;
          step *= 1.3;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    best = std::max(best, fv);
  }
  return best;
}

}  // namespace oracles
