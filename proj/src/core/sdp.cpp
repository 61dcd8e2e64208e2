#include "sdp.hpp"

#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gda::sdp {

namespace {

struct Pencil {
  MatrixXd s;        // Ks^2
  MatrixXd t_half;   // 1/2 Kst^T Kst
  VectorXd ks_y;     // Ks y
  VectorXd lin;      // Kst^T Kt b
  double y_sq = 0.0;
  double r_sq = 0.0;

  MatrixXd m_of(double eta) const { return eta * s - t_half; }
  VectorXd v_of(double eta) const { return 2.0 * eta * ks_y - lin; }
};

Pencil make_pencil(const TrustRegionProblem& tr) {
  Pencil p;
  p.s = tr.ks * tr.ks;
  p.s = 0.5 * (p.s + p.s.transpose().eval());
  p.t_half = 0.5 * tr.kst.transpose() * tr.kst;
  p.t_half = 0.5 * (p.t_half + p.t_half.transpose().eval());
  p.ks_y = tr.ks * tr.y_norm;
  p.lin = tr.kst.transpose() * (tr.kt * tr.b);
  p.y_sq = tr.y_norm.squaredNorm();
  p.r_sq = tr.r * tr.r;
  return p;
}

double dual_value(const Pencil& p, double eta) {
  const MatrixXd m = p.m_of(eta);
  const VectorXd v = p.v_of(eta);
  const linalg::SymEig me = linalg::sym_eig(m);
  const double cutoff = 1e-12 * std::max(me.values.cwiseAbs().maxCoeff(), 1e-300);
  const double vnorm = std::max(v.norm(), 1e-300);
  double quad = 0.0;
  for (Index i = 0; i < me.values.size(); ++i) {
    const double coef = me.vectors.col(i).dot(v);
    if (me.values[i] > cutoff) {
      quad += coef * coef / me.values[i];
    } else if (std::abs(coef) > 1e-9 * vnorm) {
      // v leaves range(M): sup over a is unbounded at this eta.
      return 1e300;
    }
  }
  return 0.25 * quad - eta * (p.y_sq - p.r_sq);
}

// Smallest eta with eta Ks^2 - 1/2 Kst^T Kst >= 0: the top generalized
// eigenvalue of the pencil restricted to range(Ks^2). Directions where Ks^2
// vanishes but the Kst term does not are regularized away by the eigenvalue
// cutoff and flagged.
double eta_lower_bound(const Pencil& p, bool& degenerate) {
  const linalg::SymEig es = linalg::sym_eig(p.s);
  const double smax = es.values.cwiseAbs().maxCoeff();
  const double cutoff = 1e-10 * std::max(smax, 1e-300);
  std::vector<Index> keep;
  for (Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] > cutoff) keep.push_back(i);
  const MatrixXd t_rot = es.vectors.transpose() * p.t_half * es.vectors;
  degenerate = false;
  const double t_scale = std::max(1.0, p.t_half.cwiseAbs().maxCoeff());
  for (Index i = 0; i < es.values.size(); ++i) {
    if (es.values[i] > cutoff) continue;
    if (std::abs(t_rot(i, i)) > 1e-8 * t_scale) degenerate = true;
  }
  if (keep.empty()) return 0.0;
  const Index rk = static_cast<Index>(keep.size());
  MatrixXd w(rk, rk);
  for (Index a = 0; a < rk; ++a)
    for (Index b = 0; b < rk; ++b)
      w(a, b) = t_rot(keep[a], keep[b]) /
                std::sqrt(es.values[keep[a]] * es.values[keep[b]]);
  w = 0.5 * (w + w.transpose().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXd> ws(w, Eigen::EigenvaluesOnly);
  return std::max(0.0, ws.eigenvalues().maxCoeff());
}

}  // namespace

double inner_primal_value(const TrustRegionProblem& tr, const VectorXd& a) {
  return 0.5 * (tr.kst * a).squaredNorm() - tr.b.dot(tr.kt * (tr.kst * a));
}

double inner_dual_value(const TrustRegionProblem& tr, double eta) {
  return dual_value(make_pencil(tr), eta);
}

double inner_eta_min(const TrustRegionProblem& tr) {
  bool degenerate = false;
  return eta_lower_bound(make_pencil(tr), degenerate);
}

InnerMaxResult inner_max_exact(const TrustRegionProblem& tr, double tol) {
  require(tr.r >= 0.0, ErrorCode::InvalidArgument, "trust region radius must be >= 0");
  const Pencil p = make_pencil(tr);

  // Feasibility: min over a of |Ks a - y| is the out-of-range part of y.
  const MatrixXd proj = linalg::range_projector(p.s);
  const double infeas = (tr.y_norm - proj * tr.y_norm).norm();
  require(tr.r >= infeas - 1e-9, ErrorCode::InvalidArgument,
          "trust region constraint set is empty");

  InnerMaxResult out;
  if (tr.r == 0.0) {
    // The constraint pins a to the least-squares solution of Ks a = y.
    out.a_star = linalg::sym_pinv(tr.ks) * tr.y_norm;
    out.value = inner_primal_value(tr, out.a_star);
    out.primal_gap = 0.0;
    return out;
  }

  bool degenerate = false;
  const double eta_min = eta_lower_bound(p, degenerate);
  out.hard_case = false;

  double lo = eta_min + 1e-12;
  double hi = eta_min * 1e6 + 1.0;
  // Extend the bracket while the dual still decreases at its right end.
  for (int grow = 0; grow < 40; ++grow) {
    const double probe = dual_value(p, hi);
    const double probe2 = dual_value(p, hi * 1.01);
    if (probe2 >= probe) break;
    hi *= 16.0;
  }

  // Golden-section on the convex dual.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = dual_value(p, x1);
  double f2 = dual_value(p, x2);
  for (int it = 0; it < 300; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = dual_value(p, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = dual_value(p, x2);
    }
    if (hi - lo <= 1e-10 * (1.0 + std::abs(lo))) break;
  }
  double eta_star = 0.5 * (lo + hi);
  double value = dual_value(p, eta_star);

  // Non-unimodality guard: a coarse scan of the bracket must not find a
  // lower dual value; if it does, refine around the scan minimum.
  {
    const double scan_lo = eta_min + 1e-12;
    const double scan_hi = eta_min * 1e6 + 1.0;
    double best_eta = eta_star, best_val = value;
    for (int i = 0; i <= 64; ++i) {
      const double t = static_cast<double>(i) / 64.0;
      const double eta = scan_lo * std::pow(scan_hi / scan_lo, t);
      const double f = dual_value(p, eta);
      if (f < best_val - 1e-12 * (1.0 + std::abs(best_val))) {
        best_val = f;
        best_eta = eta;
      }
    }
    if (best_eta != eta_star && best_val < value) {
      double l2 = best_eta / 4.0, h2 = best_eta * 4.0;
      for (int it = 0; it < 200; ++it) {
        const double m1 = l2 + (h2 - l2) / 3.0, m2 = h2 - (h2 - l2) / 3.0;
        if (dual_value(p, m1) <= dual_value(p, m2))
          h2 = m2;
        else
          l2 = m1;
      }
      eta_star = 0.5 * (l2 + h2);
      value = dual_value(p, eta_star);
    }
  }

  // Primal reconstruction from stationarity: a = 1/2 M(eta)^+ v(eta).
  const MatrixXd m_star = p.m_of(eta_star);
  VectorXd a = 0.5 * linalg::sym_pinv(m_star) * p.v_of(eta_star);
  double cons = (tr.ks * a - tr.y_norm).squaredNorm();

  if (cons > p.r_sq) {
    // Shrink toward the constraint center projection to restore feasibility.
    const VectorXd a_c = linalg::sym_pinv(tr.ks) * tr.y_norm;
    double lo_t = 0.0, hi_t = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo_t + hi_t);
      const VectorXd am = a_c + mid * (a - a_c);
      if ((tr.ks * am - tr.y_norm).squaredNorm() > p.r_sq)
        hi_t = mid;
      else
        lo_t = mid;
    }
    a = a_c + lo_t * (a - a_c);
    cons = (tr.ks * a - tr.y_norm).squaredNorm();
  } else if (eta_star > 1e-6 && cons < p.r_sq * (1.0 - 1e-6)) {
    // Hard case: complementarity demands a boundary point; correct along the
    // bottom eigenvector of M(eta*).
    const linalg::SymEig me = linalg::sym_eig(m_star);
    const VectorXd u0 = me.vectors.col(0);
    const VectorXd ksu = tr.ks * u0;
    const double qa = ksu.squaredNorm();
    if (qa > 1e-14) {
      const VectorXd resid = tr.ks * a - tr.y_norm;
      const double qb = 2.0 * ksu.dot(resid);
      const double qc = cons - p.r_sq;
      const double disc_q = qb * qb - 4.0 * qa * qc;
      if (disc_q >= 0.0) {
        const double t1 = (-qb + std::sqrt(disc_q)) / (2.0 * qa);
        const double t2 = (-qb - std::sqrt(disc_q)) / (2.0 * qa);
        const VectorXd cand1 = a + t1 * u0;
        const VectorXd cand2 = a + t2 * u0;
        a = inner_primal_value(tr, cand1) >= inner_primal_value(tr, cand2) ? cand1
                                                                           : cand2;
        out.hard_case = true;
      }
    }
  }

  // Boundary ascent polish of the reconstructed maximizer: the dual pinpoints
  // the face, a few projected-gradient steps in u = Ks a - y coordinates
  // remove the pseudo-inverse noise of the stationarity reconstruction.
  {
    const MatrixXd ks_pinv = linalg::sym_pinv(tr.ks);
    const MatrixXd quad = tr.kst.transpose() * tr.kst;
    VectorXd u = tr.ks * a - tr.y_norm;
    if (u.norm() > 1e-300) u *= tr.r / u.norm();
    VectorXd a_cur = ks_pinv * (tr.y_norm + u);
    double best_val = inner_primal_value(tr, a_cur);
    if (inner_primal_value(tr, a) > best_val &&
        (tr.ks * a - tr.y_norm).squaredNorm() <= p.r_sq * (1.0 + 1e-9)) {
      a_cur = a;
      best_val = inner_primal_value(tr, a);
      u = tr.ks * a - tr.y_norm;
    }
    double step = 0.5;
    for (int it = 0; it < 200 && step > 1e-16; ++it) {
      const VectorXd grad_u = ks_pinv.transpose() * (quad * a_cur - p.lin);
      bool moved = false;
      for (int bt = 0; bt < 50; ++bt) {
        VectorXd u2 = u + step * grad_u;
        if (u2.norm() > 1e-300) u2 *= tr.r / u2.norm();
        const VectorXd a2 = ks_pinv * (tr.y_norm + u2);
        const double v2 = inner_primal_value(tr, a2);
        if (v2 > best_val) {
          u = u2;
          a_cur = a2;
          best_val = v2;
          step *= 1.4;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (best_val >= inner_primal_value(tr, a) &&
        (tr.ks * a_cur - tr.y_norm).squaredNorm() <= p.r_sq * (1.0 + 1e-9) + 1e-12)
      a = a_cur;
  }

  out.eta_star = eta_star;
  out.a_star = a;
  out.primal_gap = std::abs(inner_primal_value(tr, a) - value);
  out.hard_case = out.hard_case || degenerate;
  // Zero duality gap: when the reconstructed maximizer is feasible and its
  // value agrees with the dual within numerical slack, the primal evaluation
  // is the sharper number (the dual value carries pseudo-inverse noise).
  cons = (tr.ks * a - tr.y_norm).squaredNorm();
  const bool feasible = cons <= p.r_sq * (1.0 + 1e-9) + 1e-12;
  const double primal_at_a = inner_primal_value(tr, a);
  if (feasible && out.primal_gap <= 1e-4 * (1.0 + std::abs(value)))
    out.value = primal_at_a;
  else
    out.value = value;
  (void)tol;
  return out;
}

InnerMinResult inner_min(const TrustRegionProblem& tr, double tol) {
  const VectorXd w = tr.kt * tr.b;
  const MatrixXd tt = tr.kst.transpose() * tr.kst;
  const MatrixXd ss = tr.ks * tr.ks;
  const VectorXd rhs0 = tr.kst.transpose() * w;

  // Unconstrained minimizer set: a0 + null(Kst^T Kst); pick the member with
  // the smallest constraint residual before concluding infeasibility.
  const VectorXd a0 = linalg::sym_pinv(tt) * rhs0;
  const linalg::SymEig te = linalg::sym_eig(tt);
  const double tcut = 1e-10 * std::max(te.values.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Index> null_idx;
  for (Index i = 0; i < te.values.size(); ++i)
    if (te.values[i] <= tcut) null_idx.push_back(i);
  VectorXd a_feas = a0;
  if (!null_idx.empty()) {
    MatrixXd nbasis(tt.rows(), static_cast<Index>(null_idx.size()));
    for (size_t i = 0; i < null_idx.size(); ++i)
      nbasis.col(static_cast<Index>(i)) = te.vectors.col(null_idx[i]);
    const MatrixXd ksn = tr.ks * nbasis;
    const VectorXd z = linalg::sym_pinv(MatrixXd(ksn.transpose() * ksn)) *
                       (ksn.transpose() * (tr.y_norm - tr.ks * a0));
    a_feas = a0 + nbasis * z;
  }
  const double r_sq = tr.r * tr.r;
  InnerMinResult out;
  if ((tr.ks * a_feas - tr.y_norm).squaredNorm() <= r_sq + tol) {
    out.a_star = a_feas;
    out.value = (tr.kst * a_feas - w).squaredNorm();
    return out;
  }

  // Boundary solution: a(theta) = (Kst^T Kst + theta Ks^2)^+ (Kst^T w + theta Ks y);
  // the constraint residual is non-increasing in theta, so bisect to the root.
  const VectorXd ks_y = tr.ks * tr.y_norm;
  const auto residual = [&](double theta) {
    const MatrixXd sys = tt + theta * ss;
    const VectorXd a = linalg::sym_pinv(sys) * (rhs0 + theta * ks_y);
    return std::make_pair((tr.ks * a - tr.y_norm).squaredNorm() - r_sq, a);
  };
  double lo = 0.0, hi = 1.0;
  auto [res_hi, a_hi] = residual(hi);
  int grow = 0;
  while (res_hi > 0.0 && grow++ < 200) {
    hi *= 4.0;
    std::tie(res_hi, a_hi) = residual(hi);
  }
  VectorXd a = a_hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto [res, am] = residual(mid);
    if (res > 0.0)
      lo = mid;
    else {
      hi = mid;
      a = am;
    }
    if (hi - lo <= 1e-14 * (1.0 + hi)) break;
  }
  out.a_star = a;
  out.value = (tr.kst * a - w).squaredNorm();
  return out;
}

namespace {

TrustRegionProblem tr_of(const kernels::GramBundle& bundle, double r,
                         const VectorXd& b) {
  TrustRegionProblem tr;
  tr.ks = bundle.ks;
  tr.kst = bundle.kst;
  tr.kt = bundle.kt;
  tr.y_norm = bundle.y_norm;
  tr.r = r;
  tr.b = b;
  return tr;
}

}  // namespace

double outer_objective(const kernels::GramBundle& bundle, double lambda, double r,
                       const VectorXd& b) {
  const TrustRegionProblem tr = tr_of(bundle, r, b);
  const InnerMaxResult mx = inner_max_exact(tr);
  const InnerMinResult mn = inner_min(tr);
  const double ktb_sq = (bundle.kt * b).squaredNorm();
  // |Kst a - Kt b|^2 = 2 (1/2 |Kst a|^2 - b^T Kt Kst a) + |Kt b|^2.
  const double max_term = 2.0 * mx.value + ktb_sq;
  return lambda * b.dot(bundle.kt * b) + 0.5 * (max_term + mn.value);
}

OuterResult outer_solve_alternating(const kernels::GramBundle& bundle, double lambda,
                                    double r, int iters) {
  require(r > 0.0, ErrorCode::InvalidArgument, "outer solve requires r > 0");
  const Index n = bundle.kt.rows();
  VectorXd b = VectorXd::Zero(n);

  const double kt_norm = linalg::spectral_norm(bundle.kt).value;
  double step = 1.0 / std::max(2.0 * lambda * kt_norm + 2.0 * kt_norm * kt_norm, 1e-12);

  OuterResult out;
  double f_cur = outer_objective(bundle, lambda, r, b);
  out.b_coeffs = b;
  out.objective = f_cur;

  for (int it = 0; it < iters; ++it) {
    const TrustRegionProblem tr = tr_of(bundle, r, b);
    const InnerMaxResult mx = inner_max_exact(tr);
    const InnerMinResult mn = inner_min(tr);
    const VectorXd ktb = bundle.kt * b;
    VectorXd grad = 2.0 * lambda * ktb;
    grad += bundle.kt * (ktb - bundle.kst * mx.a_star);
    grad += bundle.kt * (ktb - bundle.kst * mn.a_star);
    const double gnorm = grad.norm();
    if (gnorm <= 1e-12 * (1.0 + std::abs(f_cur))) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    double t = step;
    for (int bt = 0; bt < 40; ++bt) {
      const VectorXd b_new = b - t * grad;
      const double f_new = outer_objective(bundle, lambda, r, b_new);
      if (f_new < f_cur - 1e-12 * (1.0 + std::abs(f_cur))) {
        b = b_new;
        f_cur = f_new;
        accepted = true;
        step = std::min(t * 1.5, 1e6 * step);
        break;
      }
      t *= 0.5;
    }
    out.iterations = it + 1;
    if (f_cur < out.objective) {
      out.objective = f_cur;
      out.b_coeffs = b;
    }
    if (!accepted) {
      out.converged = true;  // no descent direction at line-search resolution
      break;
    }
  }
  return out;
}

SDPProblem build_sdp(const kernels::GramBundle& bundle, double lambda, double r) {
  require(lambda > 0.0 && r > 0.0, ErrorCode::InvalidArgument,
          "build_sdp requires lambda > 0 and r > 0");
  SDPProblem p;
  p.m = bundle.ks.rows();
  p.n = bundle.kt.rows();
  p.lambda = lambda;
  p.r = r;
  p.ks_sq = bundle.ks * bundle.ks;
  p.ks_sq = 0.5 * (p.ks_sq + p.ks_sq.transpose().eval());
  p.kst_t_kst = bundle.kst.transpose() * bundle.kst;
  p.kst_t_kst = 0.5 * (p.kst_t_kst + p.kst_t_kst.transpose().eval());
  p.kt_quad = lambda * bundle.kt + bundle.kt * bundle.kt;
  p.kt_quad = 0.5 * (p.kt_quad + p.kt_quad.transpose().eval());
  p.kt_kst = bundle.kt * bundle.kst;
  p.ktilde = p.kt_kst.transpose() * linalg::sym_pinv(p.kt_quad) * p.kt_kst;
  p.ktilde = 0.5 * (p.ktilde + p.ktilde.transpose().eval());
  p.ks_y = bundle.ks * bundle.y_norm;
  p.y_sq = bundle.y_norm.squaredNorm();
  return p;
}

namespace {

MatrixXd sdp_block1(const SDPProblem& p, const SdpCandidate& c) {
  const Index m = p.m;
  MatrixXd blk(m + 1, m + 1);
  blk.topLeftCorner(m, m) =
      c.nu * p.ks_sq + 0.5 * p.kst_t_kst - 0.25 * p.ktilde;
  const VectorXd col = c.nu * p.ks_y + 0.25 * p.ktilde * c.z_vec;
  blk.block(0, m, m, 1) = col;
  blk.block(m, 0, 1, m) = col.transpose();
  blk(m, m) = c.alpha + c.nu * (p.y_sq - p.r * p.r);
  return blk;
}

MatrixXd sdp_block2(const SDPProblem& p, const SdpCandidate& c) {
  const Index m = p.m;
  MatrixXd blk(m + 1, m + 1);
  blk.topLeftCorner(m, m) = c.z_mat;
  blk.block(0, m, m, 1) = c.z_vec;
  blk.block(m, 0, 1, m) = c.z_vec.transpose();
  blk(m, m) = 1.0;
  return blk;
}

MatrixXd sdp_block3(const SDPProblem& p, const SdpCandidate& c) {
  const Index n = p.n;
  MatrixXd blk(n + 1, n + 1);
  blk.topLeftCorner(n, n) = p.kt_quad;
  const VectorXd col = 0.5 * p.kt_kst * c.z_vec;
  blk.block(0, n, n, 1) = col;
  blk.block(n, 0, 1, n) = col.transpose();
  blk(n, n) = c.beta;
  return blk;
}

}  // namespace

SdpCheckReport check_sdp_candidate(const SDPProblem& p, const SdpCandidate& cand,
                                   double tol) {
  require(cand.z_vec.size() == p.m && cand.z_mat.rows() == p.m &&
              cand.z_mat.cols() == p.m,
          ErrorCode::Dimension, "candidate dimensions do not match the program");
  SdpCheckReport rep;
  const auto add_psd = [&](const std::string& name, const MatrixXd& blk) {
    const double mineig = linalg::min_eigenvalue(0.5 * (blk + blk.transpose().eval()));
    const bool ok = linalg::psd_check(blk, tol);
    rep.margins.push_back({name, mineig, ok});
  };
  add_psd("dual_block", sdp_block1(p, cand));
  add_psd("moment_block", sdp_block2(p, cand));
  add_psd("recovery_block", sdp_block3(p, cand));

  const double trace_lhs = (p.ks_sq * cand.z_mat).trace() -
                           2.0 * p.ks_y.dot(cand.z_vec) + p.y_sq;
  const double trace_margin = p.r * p.r - trace_lhs;
  rep.margins.push_back({"trace_constraint", trace_margin,
                         trace_margin >= -tol * std::max(1.0, p.r * p.r)});
  rep.margins.push_back({"nu_nonneg", cand.nu, cand.nu >= -tol});

  rep.feasible = true;
  for (const auto& mg : rep.margins) rep.feasible = rep.feasible && mg.ok;
  rep.objective =
      0.5 * (p.kst_t_kst * cand.z_mat).trace() - cand.beta - cand.alpha;
  return rep;
}

SdpCandidate candidate_from_primal(const SDPProblem& p, const VectorXd& a, double nu) {
  require(a.size() == p.m, ErrorCode::Dimension, "candidate a has wrong length");
  SdpCandidate c;
  c.z_vec = a;
  c.z_mat = a * a.transpose();
  c.nu = std::max(0.0, nu);
  // Minimal feasible beta and alpha via the Schur complements of the third
  // and first blocks, padded for the finite-precision eigenvalue tests.
  const VectorXd col3 = 0.5 * p.kt_kst * a;
  const double beta_min = col3.dot(linalg::sym_pinv(p.kt_quad) * col3);
  c.beta = beta_min * (1.0 + 1e-9) + 1e-12;
  const MatrixXd m1 = c.nu * p.ks_sq + 0.5 * p.kst_t_kst - 0.25 * p.ktilde;
  const VectorXd u = c.nu * p.ks_y + 0.25 * p.ktilde * a;
  const double corner_min = u.dot(linalg::sym_pinv(m1) * u);
  c.alpha = corner_min - c.nu * (p.y_sq - p.r * p.r);
  c.alpha = c.alpha * (1.0 + 1e-9) + 1e-12;
  return c;
}

SdpaData to_sdpa(const SDPProblem& p) {
  const Index m = p.m, n = p.n;
  const Index nz = m * (m + 1) / 2;
  SdpaData d;
  d.nvars = 3 + m + nz;
  d.block_sizes = {m + 1, m + 1, n + 1, -1, -1};
  d.c = VectorXd::Zero(d.nvars);

  // Variable order: alpha, beta, nu, z_1..z_m, vech(Z) column-major upper.
  const auto zvar = [&](Index i, Index j) {  // i <= j, 0-based
    return 3 + m + j * (j + 1) / 2 + i;
  };
  d.c[0] = -1.0;
  d.c[1] = -1.0;
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i <= j; ++i)
      d.c[zvar(i, j)] = (i == j) ? 0.5 * p.kst_t_kst(i, j) : p.kst_t_kst(i, j);

  const auto push = [&](Index matno, Index blkno, Index i, Index j, double value) {
    if (value != 0.0) d.entries.push_back({matno, blkno, i + 1, j + 1, value});
  };

  // Block 1: constant part -(1/2 Kst^T Kst - 1/4 Ktilde) goes into F0.
  const MatrixXd c1 = 0.5 * p.kst_t_kst - 0.25 * p.ktilde;
  for (Index i = 0; i < m; ++i)
    for (Index j = i; j < m; ++j) push(0, 1, i, j, -c1(i, j));
  // alpha at the corner.
  push(1, 1, m, m, 1.0);
  // nu multiplies [[Ks^2, Ks y]; [., |y|^2 - r^2]].
  for (Index i = 0; i < m; ++i)
    for (Index j = i; j < m; ++j) push(3, 1, i, j, p.ks_sq(i, j));
  for (Index i = 0; i < m; ++i) push(3, 1, i, m, p.ks_y[i]);
  push(3, 1, m, m, p.y_sq - p.r * p.r);
  // z_l contributes 1/4 Ktilde e_l in the border column (matno is 1-based).
  for (Index l = 0; l < m; ++l)
    for (Index i = 0; i < m; ++i) push(4 + l, 1, i, m, 0.25 * p.ktilde(i, l));

  // Block 2: [[Z, z]; [z^T, 1]].
  push(0, 2, m, m, -1.0);
  for (Index l = 0; l < m; ++l) push(4 + l, 2, l, m, 1.0);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i <= j; ++i) push(zvar(i, j) + 1, 2, i, j, 1.0);

  // Block 3: [[lambda Kt + Kt^2, 1/2 Kt Kst z]; [., beta]].
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) push(0, 3, i, j, -p.kt_quad(i, j));
  push(2, 3, n, n, 1.0);
  for (Index l = 0; l < m; ++l)
    for (Index i = 0; i < n; ++i) push(4 + l, 3, i, n, 0.5 * p.kt_kst(i, l));

  // Block 4 (diagonal): r^2 - |y|^2 + 2 y^T Ks z - Tr(Ks^2 Z) >= 0.
  push(0, 4, 0, 0, p.y_sq - p.r * p.r);
  for (Index l = 0; l < m; ++l) push(4 + l, 4, 0, 0, 2.0 * p.ks_y[l]);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i <= j; ++i)
      push(zvar(i, j) + 1, 4, 0, 0,
           (i == j) ? -p.ks_sq(i, j) : -2.0 * p.ks_sq(i, j));

  // Block 5 (diagonal): nu >= 0.
  push(3, 5, 0, 0, 1.0);

  std::sort(d.entries.begin(), d.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.matno, a.blkno, a.i, a.j) < std::tie(b.matno, b.blkno, b.i, b.j);
  });
  return d;
}

void export_sdpa(const SdpaData& d, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  require(f != nullptr, ErrorCode::Io, "cannot write SDPA file: " + path);
  std::fprintf(f, "%lld\n", static_cast<long long>(d.nvars));
  std::fprintf(f, "%zu\n", d.block_sizes.size());
  for (size_t i = 0; i < d.block_sizes.size(); ++i)
    std::fprintf(f, i ? " %lld" : "%lld", static_cast<long long>(d.block_sizes[i]));
  std::fputc('\n', f);
  for (Index i = 0; i < d.c.size(); ++i)
    std::fprintf(f, i ? " %.17g" : "%.17g", d.c[i]);
  std::fputc('\n', f);
  for (const auto& e : d.entries)
    std::fprintf(f, "%lld %lld %lld %lld %.17g\n", static_cast<long long>(e.matno),
                 static_cast<long long>(e.blkno), static_cast<long long>(e.i),
                 static_cast<long long>(e.j), e.value);
  std::fclose(f);
}

SdpaData import_sdpa(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open SDPA file: " + path);
  SdpaData d;
  std::string line;
  int header_stage = 0;
  size_t nblocks = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    std::stringstream ss(line);
    if (header_stage == 0) {
      ss >> d.nvars;
      require(!ss.fail(), ErrorCode::Parse, path + ": bad variable count");
      header_stage = 1;
    } else if (header_stage == 1) {
      ss >> nblocks;
      require(!ss.fail(), ErrorCode::Parse, path + ": bad block count");
      header_stage = 2;
    } else if (header_stage == 2) {
      long long b;
      while (ss >> b) d.block_sizes.push_back(b);
      require(d.block_sizes.size() == nblocks, ErrorCode::Parse,
              path + ": block size list length mismatch");
      header_stage = 3;
    } else if (header_stage == 3) {
      std::vector<double> cv;
      double x;
      while (ss >> x) cv.push_back(x);
      require(static_cast<Index>(cv.size()) == d.nvars, ErrorCode::Parse,
              path + ": objective vector length mismatch");
      d.c = Eigen::Map<VectorXd>(cv.data(), static_cast<Index>(cv.size()));
      header_stage = 4;
    } else {
      SdpaData::Entry e;
      ss >> e.matno >> e.blkno >> e.i >> e.j >> e.value;
      require(!ss.fail(), ErrorCode::Parse, path + ": bad entry line: " + line);
      d.entries.push_back(e);
    }
  }
  require(header_stage == 4, ErrorCode::Parse, path + ": truncated SDPA file");
  return d;
}

bool sdpa_equal(const SdpaData& a, const SdpaData& b) {
  if (a.nvars != b.nvars || a.block_sizes != b.block_sizes) return false;
  if (a.c.size() != b.c.size() || a.c != b.c) return false;
  if (a.entries.size() != b.entries.size()) return false;
  for (size_t i = 0; i < a.entries.size(); ++i) {
    const auto& x = a.entries[i];
    const auto& y = b.entries[i];
    if (x.matno != y.matno || x.blkno != y.blkno || x.i != y.i || x.j != y.j ||
        x.value != y.value)
      return false;
  }
  return true;
}

}  // namespace gda::sdp
