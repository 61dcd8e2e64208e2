#include "qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gda::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Goldfarb-Idnani dual active-set method for strictly convex QPs:
//   minimize 1/2 x^T G x + g0^T x
//   s.t. CE^T x + ce0 = 0,  CI^T x + ci0 >= 0,
// with G positive definite and unit-norm constraint columns. Constraints are
// added/dropped one at a time while maintaining J = L^-T (G = L L^T) and an
// upper-triangular R over the active normals. Pivot ties break toward the
// lowest constraint index.
// ---------------------------------------------------------------------------

struct GiResult {
  VectorXd x;
  VectorXd u_ineq;  // multipliers for CI columns
  VectorXd v_eq;    // multipliers for CE columns
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
};

class GiSolver {
 public:
  GiSolver(const MatrixXd& g, const VectorXd& g0, const MatrixXd& ce,
           const VectorXd& ce0, const MatrixXd& ci, const VectorXd& ci0, double tol,
           int max_iter)
      : g_(g), g0_(g0), ce_(ce), ce0_(ce0), ci_(ci), ci0_(ci0), tol_(tol),
        max_iter_(max_iter), n_(g.rows()), p_(ce.cols()), mi_(ci.cols()) {}

  GiResult run() {
    GiResult out;
    out.u_ineq = VectorXd::Zero(mi_);
    out.v_eq = VectorXd::Zero(p_);
    Eigen::LLT<MatrixXd> llt(g_);
    if (llt.info() != Eigen::Success) {
      out.status = SolveStatus::MaxIter;  // caller falls back
      return out;
    }
    j_ = llt.matrixL().transpose().solve(MatrixXd::Identity(n_, n_));
    x_ = -llt.solve(g0_);
    r_ = MatrixXd::Zero(n_, n_);
    d_.resize(n_);
    z_.resize(n_);
    step_r_.resize(n_);
    u_.setZero(n_ + 1);
    active_.clear();
    iq_ = 0;
    r_norm_ = 1.0;
    j_scale_ = std::max(1.0, j_.cwiseAbs().maxCoeff());

    if (!add_equalities(out)) return out;

    // Per-constraint violation tolerances (columns are unit norm).
    viol_tol_.resize(mi_);
    for (Index i = 0; i < mi_; ++i)
      viol_tol_[i] = tol_ * std::max(1.0, std::abs(ci0_[i]));

    int iter = static_cast<int>(p_);
    Index ip = -1;
    double s_ip = 0.0;
    bool need_choose = true;
    while (true) {
      if (++iter > max_iter_) {
        out.iterations = iter;
        finalize(out, SolveStatus::MaxIter);
        return out;
      }
      if (need_choose) {
        ip = -1;
        double worst = 0.0;
        for (Index i = 0; i < mi_; ++i) {
          if (is_active(i)) continue;
          const double s = ci_.col(i).dot(x_) + ci0_[i];
          if (s < -viol_tol_[i] && s < worst) {  // strict <: lowest index wins ties
            worst = s;
            ip = i;
          }
        }
        if (ip < 0) {
          out.iterations = iter;
          finalize(out, SolveStatus::Optimal);
          return out;
        }
        s_ip = worst;
        u_plus_ = 0.0;
      }
      need_choose = false;

      const VectorXd np = ci_.col(ip);
      compute_step_directions(np);

      // Partial step bound: smallest u_k / r_k over active inequality
      // constraints with r_k > 0 (lowest index on ties by strict <).
      double t1 = kInf;
      int drop_pos = -1;
      for (int k = 0; k < iq_; ++k) {
        if (active_[k] < 0) continue;  // equalities are never dropped
        if (step_r_[k] > 1e-13 * r_norm_) {
          const double cand = u_[k] / step_r_[k];
          if (cand < t1) {
            t1 = cand;
            drop_pos = k;
          }
        }
      }
      const double ztn = z_.dot(np);
      const bool z_zero = z_.norm() <= 1e-12 * j_scale_ || ztn <= 1e-14 * j_scale_;
      const double t2 = z_zero ? kInf : -s_ip / ztn;
      const double t = std::min(t1, t2);

      if (t1 == kInf && t2 == kInf) {
        out.iterations = iter;
        // No progress possible in primal or dual space. With exact
        // arithmetic this certifies an empty feasible set; the caller
        // re-verifies before reporting infeasibility.
        finalize(out, s_ip >= -10.0 * viol_tol_[ip] ? SolveStatus::MaxIter
                                                    : SolveStatus::Infeasible);
        return out;
      }

      if (t2 == kInf) {
        // Dual-only step: drop the blocking constraint and retry.
        for (int k = 0; k < iq_; ++k) u_[k] -= t * step_r_[k];
        u_plus_ += t;
        drop_constraint(drop_pos);
        continue;
      }

      x_ += t * z_;
      for (int k = 0; k < iq_; ++k) u_[k] -= t * step_r_[k];
      u_plus_ += t;
      s_ip += t * ztn;

      if (t == t2) {
        u_[iq_] = u_plus_;
        add_constraint(ip);
        need_choose = true;
      } else {
        drop_constraint(drop_pos);
        s_ip = ci_.col(ip).dot(x_) + ci0_[ip];
      }
    }
  }

 private:
  bool is_active(Index ci_index) const {
    for (int k = 0; k < iq_; ++k)
      if (active_[k] == static_cast<int>(ci_index)) return true;
    return false;
  }

  // d = J^T np, z = J2 d2, r = R^-1 d1.
  void compute_step_directions(const VectorXd& np) {
    d_ = j_.transpose() * np;
    z_.setZero();
    if (iq_ < n_) z_ = j_.rightCols(n_ - iq_) * d_.tail(n_ - iq_);
    if (iq_ > 0)
      step_r_.head(iq_) = r_.topLeftCorner(iq_, iq_)
                              .triangularView<Eigen::Upper>()
                              .solve(d_.head(iq_));
  }

  bool add_constraint(int id) {
    for (Index j = n_ - 1; j >= iq_ + 1; --j) {
      const double cc = d_[j - 1];
      const double ss = d_[j];
      const double h = std::hypot(cc, ss);
      if (h < 1e-300) continue;
      d_[j] = 0.0;
      const double c = cc / h;
      const double s = ss / h;
      const VectorXd t1 = j_.col(j - 1);
      const VectorXd t2 = j_.col(j);
      if (c < 0) {
        j_.col(j - 1) = -c * t1 - s * t2;
        j_.col(j) = s * t1 - c * t2;
        d_[j - 1] = -h;
      } else {
        j_.col(j - 1) = c * t1 + s * t2;
        j_.col(j) = -s * t1 + c * t2;
        d_[j - 1] = h;
      }
    }
    if (std::abs(d_[iq_]) <= 1e-12 * r_norm_) return false;  // dependent normal
    r_.col(iq_).head(iq_ + 1) = d_.head(iq_ + 1);
    active_.push_back(id);
    ++iq_;
    r_norm_ = std::max(r_norm_, std::abs(d_[iq_ - 1]));
    return true;
  }

  void drop_constraint(int pos) {
    for (int k = pos; k + 1 < iq_; ++k) {
      r_.col(k).head(iq_) = r_.col(k + 1).head(iq_);
      u_[k] = u_[k + 1];
      active_[k] = active_[k + 1];
    }
    u_[iq_ - 1] = u_[iq_];
    active_.pop_back();
    --iq_;
    for (int j = pos; j < iq_; ++j) {
      const double cc = r_(j, j);
      const double ss = r_(j + 1, j);
      const double h = std::hypot(cc, ss);
      if (h < 1e-300) continue;
      const double c = cc / h;
      const double s = ss / h;
      r_(j, j) = h;
      r_(j + 1, j) = 0.0;
      for (int k = j + 1; k < iq_; ++k) {
        const double t1 = r_(j, k);
        const double t2 = r_(j + 1, k);
        r_(j, k) = c * t1 + s * t2;
        r_(j + 1, k) = -s * t1 + c * t2;
      }
      const VectorXd t1 = j_.col(j);
      const VectorXd t2 = j_.col(j + 1);
      j_.col(j) = c * t1 + s * t2;
      j_.col(j + 1) = -s * t1 + c * t2;
    }
  }

  bool add_equalities(GiResult& out) {
    for (Index j = 0; j < p_; ++j) {
      const VectorXd np = ce_.col(j);
      compute_step_directions(np);
      const bool z_zero = z_.norm() <= 1e-12 * j_scale_;
      const double s = np.dot(x_) + ce0_[j];
      if (z_zero) {
        if (std::abs(s) > tol_ * std::max(1.0, std::abs(ce0_[j]))) {
          out.iterations = static_cast<int>(j);
          finalize(out, SolveStatus::Infeasible);
          return false;
        }
        continue;  // consistent dependent equality
      }
      const double t2 = -s / z_.dot(np);
      x_ += t2 * z_;
      for (int k = 0; k < iq_; ++k) u_[k] -= t2 * step_r_[k];
      u_[iq_] = t2;
      add_constraint(-static_cast<int>(j) - 1);
    }
    return true;
  }

  void finalize(GiResult& out, SolveStatus status) {
    out.status = status;
    out.x = x_;
    for (int k = 0; k < iq_; ++k) {
      if (active_[k] >= 0)
        out.u_ineq[active_[k]] = std::max(0.0, u_[k]);
      else
        out.v_eq[-active_[k] - 1] = u_[k];
    }
  }

  const MatrixXd& g_;
  const VectorXd& g0_;
  const MatrixXd& ce_;
  const VectorXd& ce0_;
  const MatrixXd& ci_;
  const VectorXd& ci0_;
  double tol_;
  int max_iter_;
  Index n_, p_, mi_;

  MatrixXd j_, r_;
  VectorXd x_, d_, z_, step_r_, u_, viol_tol_;
  std::vector<int> active_;
  int iq_ = 0;
  double r_norm_ = 1.0;
  double j_scale_ = 1.0;
  double u_plus_ = 0.0;
};

// ---------------------------------------------------------------------------
// ADMM fallback (operator splitting in OSQP form) over l <= Ax <= u rows,
// with a terminal active-set polish.
// ---------------------------------------------------------------------------

struct RowForm {
  MatrixXd a;
  VectorXd l;
  VectorXd u;
  std::vector<int> kind;   // 0 = equality, 1 = aineq row, 2 = lb, 3 = ub
  std::vector<Index> ref;  // row/variable index in the original problem
};

RowForm build_rows(const QPProblem& p) {
  const Index v = p.vars();
  Index rows = p.aeq.rows() + p.aineq.rows();
  std::vector<Index> lb_idx, ub_idx;
  for (Index i = 0; i < p.lb.size(); ++i)
    if (p.lb[i] > -kInf) lb_idx.push_back(i);
  for (Index i = 0; i < p.ub.size(); ++i)
    if (p.ub[i] < kInf) ub_idx.push_back(i);
  rows += static_cast<Index>(lb_idx.size() + ub_idx.size());

  RowForm rf;
  rf.a.setZero(rows, v);
  rf.l.resize(rows);
  rf.u.resize(rows);
  Index r = 0;
  for (Index i = 0; i < p.aeq.rows(); ++i, ++r) {
    rf.a.row(r) = p.aeq.row(i);
    rf.l[r] = rf.u[r] = p.beq[i];
    rf.kind.push_back(0);
    rf.ref.push_back(i);
  }
  for (Index i = 0; i < p.aineq.rows(); ++i, ++r) {
    rf.a.row(r) = p.aineq.row(i);
    rf.l[r] = -kInf;
    rf.u[r] = p.bineq[i];
    rf.kind.push_back(1);
    rf.ref.push_back(i);
  }
  for (Index i : lb_idx) {
    rf.a(r, i) = 1.0;
    rf.l[r] = p.lb[i];
    rf.u[r] = (p.ub.size() == v && p.ub[i] < kInf) ? p.ub[i] : kInf;
    rf.kind.push_back(2);
    rf.ref.push_back(i);
    ++r;
  }
  for (Index i : ub_idx) {
    if (p.lb.size() == v && p.lb[i] > -kInf) continue;  // folded into the lb row
    rf.a(r, i) = 1.0;
    rf.l[r] = -kInf;
    rf.u[r] = p.ub[i];
    rf.kind.push_back(3);
    rf.ref.push_back(i);
    ++r;
  }
  rf.a.conservativeResize(r, v);
  rf.l.conservativeResize(r);
  rf.u.conservativeResize(r);
  return rf;
}

struct AdmmResult {
  VectorXd x;
  VectorXd y;  // row multipliers (positive pushes against the upper bound)
  VectorXd x_raw;  // pre-polish iterate
  VectorXd y_raw;
  int iterations = 0;
  double primal_infeas = 0.0;  // final |Ax - clamp(Ax)| residual
};

AdmmResult admm_solve(const QPProblem& p, const RowForm& rf, const SolveOptions& opts) {
  const Index v = p.vars();
  const Index m = rf.a.rows();
  const double sigma = 1e-6;
  const double alpha = 1.6;
  const double scale = std::max(
      {1.0, p.p.size() ? p.p.cwiseAbs().maxCoeff() : 0.0, p.c.cwiseAbs().maxCoeff()});
  VectorXd rho(m);
  for (Index i = 0; i < m; ++i)
    rho[i] = ((rf.kind[i] == 0) ? 1e3 : 1e-1) * scale;

  MatrixXd kkt(v + m, v + m);
  kkt.setZero();
  kkt.topLeftCorner(v, v) = p.p + sigma * MatrixXd::Identity(v, v);
  kkt.topRightCorner(v, m) = rf.a.transpose();
  kkt.bottomLeftCorner(m, v) = rf.a;
  kkt.bottomRightCorner(m, m) = (-rho.cwiseInverse()).asDiagonal();
  Eigen::PartialPivLU<MatrixXd> lu(kkt);

  VectorXd x = VectorXd::Zero(v), z = VectorXd::Zero(m), y = VectorXd::Zero(m);
  if (m > 0) z = z.cwiseMax(rf.l).cwiseMin(rf.u);
  VectorXd rhs(v + m), sol(v + m);
  AdmmResult out;
  const int iters = std::max(opts.max_iter, 4000);
  for (int it = 0; it < iters; ++it) {
    rhs.head(v) = sigma * x - p.c;
    rhs.tail(m) = z - rho.cwiseInverse().cwiseProduct(y);
    sol = lu.solve(rhs);
    const VectorXd x_t = sol.head(v);
    const VectorXd z_t = z + rho.cwiseInverse().cwiseProduct(sol.tail(m) - y);
    x = alpha * x_t + (1.0 - alpha) * x;
    const VectorXd z_pre =
        alpha * z_t + (1.0 - alpha) * z + rho.cwiseInverse().cwiseProduct(y);
    const VectorXd z_new = z_pre.cwiseMax(rf.l).cwiseMin(rf.u);
    y = y + rho.cwiseProduct(alpha * z_t + (1.0 - alpha) * z - z_new);
    z = z_new;
    out.iterations = it + 1;
    if ((it + 1) % 25 == 0) {
      const double rp = m > 0 ? (rf.a * x - z).cwiseAbs().maxCoeff() : 0.0;
      const double rd =
          (p.p * x + p.c + rf.a.transpose() * y).cwiseAbs().maxCoeff() / scale;
      if (rp < 1e-10 * (1.0 + z.cwiseAbs().maxCoeff()) && rd < 1e-10) break;
    }
  }
  out.x = x;
  out.y = y;
  out.x_raw = x;
  out.y_raw = y;
  if (m > 0) {
    const VectorXd ax = rf.a * x;
    out.primal_infeas =
        (ax - ax.cwiseMax(rf.l).cwiseMin(rf.u)).cwiseAbs().maxCoeff();
  }

  // Polish: equality-solve over the detected active rows, keep on improvement.
  std::vector<Index> act;
  std::vector<double> target;
  for (Index i = 0; i < m; ++i) {
    const bool has_l = rf.l[i] > -kInf;
    const bool has_u = rf.u[i] < kInf;
    const double dl = has_l ? std::abs(z[i] - rf.l[i]) : kInf;
    const double du = has_u ? std::abs(rf.u[i] - z[i]) : kInf;
    const double ztol = 1e-6 * (1.0 + std::abs(z[i]));
    const double ytol = 1e-8 * scale;
    if (rf.kind[i] == 0) {
      act.push_back(i);
      target.push_back(rf.l[i]);
    } else if ((dl < ztol || y[i] < -ytol) && dl <= du) {
      act.push_back(i);
      target.push_back(rf.l[i]);
    } else if (du < ztol || y[i] > ytol) {
      act.push_back(i);
      target.push_back(rf.u[i]);
    }
  }
  const Index k = static_cast<Index>(act.size());
  MatrixXd kkt2(v + k, v + k);
  kkt2.setZero();
  kkt2.topLeftCorner(v, v) =
      p.p + 1e-12 * scale * MatrixXd::Identity(v, v);
  VectorXd rhs2(v + k);
  rhs2.head(v) = -p.c;
  for (Index j = 0; j < k; ++j) {
    kkt2.block(0, v + j, v, 1) = rf.a.row(act[j]).transpose();
    kkt2.block(v + j, 0, 1, v) = rf.a.row(act[j]);
    kkt2(v + j, v + j) = -1e-12 * scale;
    rhs2[v + j] = target[j];
  }
  Eigen::PartialPivLU<MatrixXd> lu2(kkt2);
  VectorXd sol2 = lu2.solve(rhs2);
  sol2 += lu2.solve(rhs2 - kkt2 * sol2);  // one refinement pass
  const VectorXd x_pol = sol2.head(v);
  if (x_pol.allFinite()) {
    bool feasible = true;
    double pol_infeas = 0.0;
    if (m > 0) {
      const VectorXd ax = rf.a * x_pol;
      const VectorXd clamped = ax.cwiseMax(rf.l).cwiseMin(rf.u);
      pol_infeas = (ax - clamped).cwiseAbs().maxCoeff();
      feasible = pol_infeas <= 1e-7 * (1.0 + clamped.cwiseAbs().maxCoeff());
    }
    const double obj_old = 0.5 * x.dot(p.p * x) + p.c.dot(x);
    const double obj_new = 0.5 * x_pol.dot(p.p * x_pol) + p.c.dot(x_pol);
    if (feasible && obj_new <= obj_old + 1e-7 * (1.0 + std::abs(obj_old))) {
      out.x = x_pol;
      VectorXd y_pol = VectorXd::Zero(m);
      for (Index j = 0; j < k; ++j) y_pol[act[j]] = sol2[v + j];
      out.y = y_pol;
      out.primal_infeas = pol_infeas;
    }
  }
  return out;
}

void split_row_multipliers(const QPProblem& p, const RowForm& rf, const VectorXd& y,
                           VectorXd& eq_mult, VectorXd& ineq_mult, VectorXd& lb_mult,
                           VectorXd& ub_mult) {
  const Index v = p.vars();
  eq_mult.setZero(p.aeq.rows());
  ineq_mult.setZero(p.aineq.rows());
  lb_mult.setZero(v);
  ub_mult.setZero(v);
  for (Index i = 0; i < rf.a.rows(); ++i) {
    switch (rf.kind[i]) {
      case 0: eq_mult[rf.ref[i]] = y[i]; break;
      case 1: ineq_mult[rf.ref[i]] = std::max(0.0, y[i]); break;
      case 2:
        lb_mult[rf.ref[i]] = std::max(0.0, -y[i]);
        ub_mult[rf.ref[i]] = std::max(0.0, y[i]);  // lb row may carry the ub too
        break;
      case 3: ub_mult[rf.ref[i]] = std::max(0.0, y[i]); break;
    }
  }
}

// Crossover refinement: from a near-solution, detect the active rows by
// slack, solve the equality-constrained KKT system exactly, and repair the
// working set (drop wrong-signed multipliers, add violated rows) for a few
// passes. Degenerate faces that stall first-order methods at ~1e-5 residuals
// resolve to machine precision here.
struct Refined {
  VectorXd x;
  VectorXd y;
  bool ok = false;
};

Refined refine_active_set(const QPProblem& p, const RowForm& rf, const VectorXd& x0) {
  const Index v = p.vars();
  const Index m = rf.a.rows();
  const double scale = std::max(
      {1.0, p.p.size() ? p.p.cwiseAbs().maxCoeff() : 0.0, p.c.cwiseAbs().maxCoeff()});
  const double bscale =
      m > 0 ? std::max(1.0, rf.u.cwiseAbs().cwiseMin(1e300).maxCoeff()) : 1.0;

  // side[i]: 0 inactive, +1 pinned at upper, -1 pinned at lower
  std::vector<int> side(static_cast<size_t>(m), 0);
  const VectorXd ax0 = m > 0 ? VectorXd(rf.a * x0) : VectorXd();
  for (Index i = 0; i < m; ++i) {
    if (rf.kind[i] == 0) {
      side[static_cast<size_t>(i)] = 1;  // equality rows always active
      continue;
    }
    const bool has_l = rf.l[i] > -kInf;
    const bool has_u = rf.u[i] < kInf;
    const double dl = has_l ? std::abs(ax0[i] - rf.l[i]) : kInf;
    const double du = has_u ? std::abs(rf.u[i] - ax0[i]) : kInf;
    const double tol = 1e-6 * bscale;
    if (du <= dl && du < tol)
      side[static_cast<size_t>(i)] = 1;
    else if (dl < tol)
      side[static_cast<size_t>(i)] = -1;
  }

  Refined out;
  for (int pass = 0; pass < 12; ++pass) {
    std::vector<Index> act;
    for (Index i = 0; i < m; ++i)
      if (side[static_cast<size_t>(i)] != 0) act.push_back(i);
    const Index k = static_cast<Index>(act.size());
    MatrixXd kkt(v + k, v + k);
    kkt.setZero();
    kkt.topLeftCorner(v, v) = p.p + 1e-13 * scale * MatrixXd::Identity(v, v);
    VectorXd rhs(v + k);
    rhs.head(v) = -p.c;
    for (Index j = 0; j < k; ++j) {
      kkt.block(0, v + j, v, 1) = rf.a.row(act[j]).transpose();
      kkt.block(v + j, 0, 1, v) = rf.a.row(act[j]);
      kkt(v + j, v + j) = -1e-13 * scale;
      rhs[v + j] =
          side[static_cast<size_t>(act[j])] > 0 ? rf.u[act[j]] : rf.l[act[j]];
    }
    Eigen::PartialPivLU<MatrixXd> lu(kkt);
    VectorXd sol = lu.solve(rhs);
    sol += lu.solve(rhs - kkt * sol);
    if (!sol.allFinite()) return out;
    const VectorXd x = sol.head(v);

    // Wrong-signed multiplier: release the worst offender.
    Index drop = -1;
    double worst_mult = -1e-9 * scale;
    for (Index j = 0; j < k; ++j) {
      const Index row = act[j];
      if (rf.kind[row] == 0) continue;
      const double mult = sol[v + j];  // >0 pushes against upper
      const double signed_mult = side[static_cast<size_t>(row)] > 0 ? mult : -mult;
      if (signed_mult < worst_mult) {
        worst_mult = signed_mult;
        drop = row;
      }
    }
    if (drop >= 0) {
      side[static_cast<size_t>(drop)] = 0;
      continue;
    }
    // Violated inactive row: pin the worst offender.
    Index add = -1;
    int add_side = 0;
    double worst_viol = 1e-9 * bscale;
    if (m > 0) {
      const VectorXd ax = rf.a * x;
      for (Index i = 0; i < m; ++i) {
        if (side[static_cast<size_t>(i)] != 0) continue;
        if (rf.u[i] < kInf && ax[i] - rf.u[i] > worst_viol) {
          worst_viol = ax[i] - rf.u[i];
          add = i;
          add_side = 1;
        }
        if (rf.l[i] > -kInf && rf.l[i] - ax[i] > worst_viol) {
          worst_viol = rf.l[i] - ax[i];
          add = i;
          add_side = -1;
        }
      }
    }
    if (add >= 0) {
      side[static_cast<size_t>(add)] = add_side;
      continue;
    }
    out.x = x;
    out.y = VectorXd::Zero(m);
    for (Index j = 0; j < k; ++j) out.y[act[j]] = sol[v + j];
    out.ok = true;
    return out;
  }
  return out;
}

}  // namespace

double kkt_residual(const QPProblem& p, const VectorXd& x, const VectorXd& eq_mult,
                    const VectorXd& ineq_mult, const VectorXd& lb_mult,
                    const VectorXd& ub_mult) {
  const Index v = p.vars();
  VectorXd grad = p.p * x + p.c;
  if (p.aeq.rows() > 0) grad += p.aeq.transpose() * eq_mult;
  if (p.aineq.rows() > 0) grad += p.aineq.transpose() * ineq_mult;
  if (lb_mult.size() == v) grad -= lb_mult;
  if (ub_mult.size() == v) grad += ub_mult;
  const double grad_scale =
      std::max(1.0, std::max((p.p * x).cwiseAbs().maxCoeff(),
                             p.c.size() ? p.c.cwiseAbs().maxCoeff() : 0.0));
  double res = grad.cwiseAbs().maxCoeff() / grad_scale;

  if (p.aeq.rows() > 0) {
    const double scale = std::max(1.0, p.beq.cwiseAbs().maxCoeff());
    res = std::max(res, (p.aeq * x - p.beq).cwiseAbs().maxCoeff() / scale);
  }
  if (p.aineq.rows() > 0) {
    const double scale = std::max(1.0, p.bineq.cwiseAbs().maxCoeff());
    const VectorXd slack = p.aineq * x - p.bineq;
    res = std::max(res, slack.maxCoeff() / scale);
    for (Index i = 0; i < slack.size(); ++i)
      res = std::max(res, std::abs(ineq_mult[i] * slack[i]) / scale);
  }
  for (Index i = 0; i < p.lb.size(); ++i) {
    if (p.lb[i] == -kInf) continue;
    res = std::max(res, p.lb[i] - x[i]);
    if (lb_mult.size() == v) res = std::max(res, std::abs(lb_mult[i] * (x[i] - p.lb[i])));
  }
  for (Index i = 0; i < p.ub.size(); ++i) {
    if (p.ub[i] == kInf) continue;
    res = std::max(res, x[i] - p.ub[i]);
    if (ub_mult.size() == v) res = std::max(res, std::abs(ub_mult[i] * (p.ub[i] - x[i])));
  }
  return res;
}

namespace {

void validate_problem(const QPProblem& p) {
  const Index v = p.vars();
  require(v >= 1, ErrorCode::InvalidArgument, "QP has no variables");
  require(p.p.rows() == v && p.p.cols() == v, ErrorCode::Dimension,
          "QP quadratic term has wrong shape");
  const double asym = (p.p - p.p.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-10 * std::max(1.0, p.p.cwiseAbs().maxCoeff()),
          ErrorCode::InvalidArgument, "QP quadratic term is not symmetric");
  require(p.aeq.rows() == p.beq.size(), ErrorCode::Dimension, "Aeq/beq mismatch");
  require(p.aineq.rows() == p.bineq.size(), ErrorCode::Dimension,
          "Aineq/bineq mismatch");
  require(p.aeq.rows() == 0 || p.aeq.cols() == v, ErrorCode::Dimension,
          "Aeq column count mismatch");
  require(p.aineq.rows() == 0 || p.aineq.cols() == v, ErrorCode::Dimension,
          "Aineq column count mismatch");
  require(p.lb.size() == 0 || p.lb.size() == v, ErrorCode::Dimension,
          "lb length mismatch");
  require(p.ub.size() == 0 || p.ub.size() == v, ErrorCode::Dimension,
          "ub length mismatch");
}

SolveReport report_from(const QPProblem& p, const VectorXd& x, const VectorXd& eq_mult,
                        const VectorXd& ineq_mult, const VectorXd& lb_mult,
                        const VectorXd& ub_mult, SolveStatus status, int iterations,
                        double tol) {
  SolveReport rep;
  rep.x = x;
  rep.objective = 0.5 * x.dot(p.p * x) + p.c.dot(x);
  rep.iterations = iterations;
  rep.eq_multipliers = eq_mult;
  rep.ineq_multipliers = ineq_mult;
  rep.kkt_residual = kkt_residual(p, x, eq_mult, ineq_mult, lb_mult, ub_mult);
  rep.status = (status == SolveStatus::Optimal && rep.kkt_residual > tol)
                   ? SolveStatus::MaxIter
                   : status;
  return rep;
}

SolveReport infeasible_report(const QPProblem& p) {
  SolveReport rep;
  rep.x = VectorXd::Zero(p.vars());
  rep.status = SolveStatus::Infeasible;
  rep.eq_multipliers = VectorXd::Zero(p.aeq.rows());
  rep.ineq_multipliers = VectorXd::Zero(p.aineq.rows());
  rep.kkt_residual = kInf;
  return rep;
}

}  // namespace

SolveReport solve_qp(const QPProblem& p, const SolveOptions& opts) {
  validate_problem(p);
  const Index v = p.vars();

  // Inconsistent equality systems are reported before any pivoting.
  if (p.aeq.rows() > 0) {
    const VectorXd x_ls = p.aeq.colPivHouseholderQr().solve(p.beq);
    const double scale = std::max(1.0, p.beq.cwiseAbs().maxCoeff());
    if ((p.aeq * x_ls - p.beq).cwiseAbs().maxCoeff() > 1e-8 * scale)
      return infeasible_report(p);
  }

  const RowForm rf = build_rows(p);

  const double p_scale = p.p.cwiseAbs().maxCoeff();
  const double c_scale = std::max(1.0, p.c.cwiseAbs().maxCoeff());
  const bool lp_like = p_scale <= 1e-8 * c_scale;
  bool gi_said_infeasible = false;

  if (v <= 600 && !lp_like) {
    // Jitter keeps the Cholesky factor well-posed for PSD-singular P; the
    // objective and KKT residuals are always evaluated with the original P.
    MatrixXd g = 0.5 * (p.p + p.p.transpose());
    const double delta = 1e-9 * std::max(1.0, g.trace() / static_cast<double>(v));
    g.diagonal().array() += delta;

    // Canonical GI form with unit-norm constraint columns.
    Index mi = p.aineq.rows();
    std::vector<Index> lb_idx, ub_idx;
    for (Index i = 0; i < p.lb.size(); ++i)
      if (p.lb[i] > -kInf) lb_idx.push_back(i);
    for (Index i = 0; i < p.ub.size(); ++i)
      if (p.ub[i] < kInf) ub_idx.push_back(i);
    mi += static_cast<Index>(lb_idx.size() + ub_idx.size());

    MatrixXd ci(v, mi);
    VectorXd ci0(mi), ci_scale(mi);
    Index col = 0;
    for (Index i = 0; i < p.aineq.rows(); ++i, ++col) {
      const double norm = std::max(p.aineq.row(i).norm(), 1e-300);
      ci.col(col) = -p.aineq.row(i).transpose() / norm;
      ci0[col] = p.bineq[i] / norm;
      ci_scale[col] = norm;
    }
    for (Index i : lb_idx) {
      ci.col(col).setZero();
      ci(i, col) = 1.0;
      ci0[col] = -p.lb[i];
      ci_scale[col] = 1.0;
      ++col;
    }
    for (Index i : ub_idx) {
      ci.col(col).setZero();
      ci(i, col) = -1.0;
      ci0[col] = p.ub[i];
      ci_scale[col] = 1.0;
      ++col;
    }
    MatrixXd ce(v, p.aeq.rows());
    VectorXd ce0(p.aeq.rows()), ce_scale(p.aeq.rows());
    for (Index i = 0; i < p.aeq.rows(); ++i) {
      const double norm = std::max(p.aeq.row(i).norm(), 1e-300);
      ce.col(i) = p.aeq.row(i).transpose() / norm;
      ce0[i] = -p.beq[i] / norm;
      ce_scale[i] = norm;
    }

    GiSolver gi(g, p.c, ce, ce0, ci, ci0, opts.tol, opts.max_iter);
    GiResult res = gi.run();
    gi_said_infeasible = res.status == SolveStatus::Infeasible;
    if (res.status == SolveStatus::Optimal) {
      VectorXd eq_mult = VectorXd::Zero(p.aeq.rows());
      for (Index i = 0; i < p.aeq.rows(); ++i)
        eq_mult[i] = -res.v_eq[i] / ce_scale[i];
      VectorXd ineq_mult = VectorXd::Zero(p.aineq.rows());
      VectorXd lb_mult = VectorXd::Zero(v), ub_mult = VectorXd::Zero(v);
      Index c2 = 0;
      for (Index i = 0; i < p.aineq.rows(); ++i, ++c2)
        ineq_mult[i] = res.u_ineq[c2] / ci_scale[c2];
      for (Index i : lb_idx) lb_mult[i] = res.u_ineq[c2++];
      for (Index i : ub_idx) ub_mult[i] = res.u_ineq[c2++];
      SolveReport rep = report_from(p, res.x, eq_mult, ineq_mult, lb_mult, ub_mult,
                                    res.status, res.iterations, opts.tol);
      if (rep.status == SolveStatus::Optimal) return rep;
      const Refined ref = refine_active_set(p, rf, res.x);
      if (ref.ok) {
        VectorXd eq2, in2, lb2, ub2;
        split_row_multipliers(p, rf, ref.y, eq2, in2, lb2, ub2);
        SolveReport rep2 = report_from(p, ref.x, eq2, in2, lb2, ub2,
                                       SolveStatus::Optimal, res.iterations, opts.tol);
        if (rep2.status == SolveStatus::Optimal) return rep2;
      }
    }
  }

  // Fallback path: operator splitting plus polish. Also the arbiter for
  // infeasibility claims from the active-set pass.
  AdmmResult ar = admm_solve(p, rf, opts);
  const double feas_scale =
      1.0 + (rf.a.rows() > 0 ? rf.u.cwiseAbs().cwiseMin(1e300).maxCoeff() : 0.0);
  const bool admm_feasible = ar.primal_infeas <= 1e-6 * feas_scale;
  if (!admm_feasible && (gi_said_infeasible || ar.primal_infeas > 1e-3 * feas_scale))
    return infeasible_report(p);

  VectorXd eq_mult, ineq_mult, lb_mult, ub_mult;
  split_row_multipliers(p, rf, ar.y, eq_mult, ineq_mult, lb_mult, ub_mult);
  SolveReport best = report_from(p, ar.x, eq_mult, ineq_mult, lb_mult, ub_mult,
                                 SolveStatus::Optimal, ar.iterations, opts.tol);
  split_row_multipliers(p, rf, ar.y_raw, eq_mult, ineq_mult, lb_mult, ub_mult);
  const SolveReport raw = report_from(p, ar.x_raw, eq_mult, ineq_mult, lb_mult,
                                      ub_mult, SolveStatus::Optimal, ar.iterations,
                                      opts.tol);
  if (raw.kkt_residual < best.kkt_residual) best = raw;
  const Refined ref = refine_active_set(p, rf, ar.x);
  if (ref.ok) {
    split_row_multipliers(p, rf, ref.y, eq_mult, ineq_mult, lb_mult, ub_mult);
    const SolveReport rep = report_from(p, ref.x, eq_mult, ineq_mult, lb_mult,
                                        ub_mult, SolveStatus::Optimal, ar.iterations,
                                        opts.tol);
    if (rep.kkt_residual < best.kkt_residual) best = rep;
  }
  return best;
}

VectorXd project_simplex(const VectorXd& v) {
  const Index k = v.size();
  require(k >= 1, ErrorCode::InvalidArgument, "project_simplex needs k >= 1");
  std::vector<double> u(v.data(), v.data() + k);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (Index j = 0; j < k; ++j) {
    cumsum += u[static_cast<size_t>(j)];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<size_t>(j)] - t > 0.0) tau = t;
  }
  return (v.array() - tau).max(0.0);
}

}  // namespace gda::optim
