#include "discrepancy.hpp"

#include "linalg.hpp"
#include "qp.hpp"
#include "rng.hpp"

#include <cmath>

namespace gda::disc {

FeatureSpace build_feature_space(const kernels::KernelSpec& kernel,
                                 const data::Dataset& ds) {
  FeatureSpace fs;
  if (kernel.kind == kernels::KernelKind::Linear) {
    fs.source = ds.source_x;
    fs.target = ds.target_x;
    return fs;
  }
  const Index m = ds.m(), n = ds.n();
  MatrixXd all(m + n, ds.dim());
  all.topRows(m) = ds.source_x;
  all.bottomRows(n) = ds.target_x;
  MatrixXd g = kernels::gram(kernel, all, all);
  const linalg::SymEig e = linalg::sym_eig(g);
  const double cutoff = 1e-12 * e.values.cwiseAbs().maxCoeff();
  Index rank = 0;
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] > cutoff) ++rank;
  // Features Phi = V D^(1/2) over kept directions, so Phi Phi^T = G.
  MatrixXd phi(m + n, rank);
  Index col = 0;
  for (Index i = 0; i < e.values.size(); ++i) {
    if (e.values[i] <= cutoff) continue;
    phi.col(col++) = e.vectors.col(i) * std::sqrt(e.values[i]);
  }
  fs.source = phi.topRows(m);
  fs.target = phi.bottomRows(n);
  return fs;
}

MatrixXd moment_mismatch(const FeatureSpace& fs, const VectorXd& q) {
  const Index f = fs.source.cols();
  MatrixXd m = MatrixXd::Zero(f, f);
  m.noalias() = fs.source.transpose() * q.asDiagonal() * fs.source;
  m.noalias() -= fs.target.transpose() * fs.target / static_cast<double>(fs.target.rows());
  return 0.5 * (m + m.transpose().eval());
}

double disc_l2(const data::WeightVector& q, const data::Dataset& ds,
               const HypothesisClassSpec& hclass) {
  data::validate(q, ds.m());
  require(q.simplex_flag, ErrorCode::InvalidArgument, "disc_l2 requires simplex q");
  require(hclass.lambda_cap > 0.0, ErrorCode::InvalidArgument,
          "hypothesis class radius must be positive");
  const FeatureSpace fs = build_feature_space(hclass.kernel, ds);
  const MatrixXd m = moment_mismatch(fs, q.weights);
  return 4.0 * hclass.lambda_cap * hclass.lambda_cap * linalg::spectral_norm(m).value;
}

DmResult dm_minimize(const data::Dataset& ds, const HypothesisClassSpec& hclass,
                     int iters, std::uint64_t seed, const VectorXd* warm_start) {
  data::validate(ds);
  const Index m = ds.m();
  const FeatureSpace fs = build_feature_space(hclass.kernel, ds);
  const double cap_sq = 4.0 * hclass.lambda_cap * hclass.lambda_cap;

  double max_feat_sq = 0.0;
  for (Index i = 0; i < m; ++i)
    max_feat_sq = std::max(max_feat_sq, fs.source.row(i).squaredNorm());
  const double step_c = 1.0 / std::max(cap_sq * max_feat_sq, 1e-300);

  VectorXd q = VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  if (warm_start) {
    require(warm_start->size() == m, ErrorCode::Dimension,
            "dm_minimize warm start length mismatch");
    q = optim::project_simplex(*warm_start);
  }

  // Seeded start vector for the power iteration; warm-started across steps.
  Rng rng(derive_seed(seed, 0x6d6d));
  VectorXd eig_warm(fs.source.cols());
  for (Index i = 0; i < eig_warm.size(); ++i) eig_warm[i] = rng.gaussian(0.0, 1.0);

  VectorXd best_q = q;
  double best_val = linalg::spectral_norm_warm(moment_mismatch(fs, q), eig_warm).value;

  DmResult out;
  double best_at_checkpoint = best_val;
  const int checkpoint = std::max(1, (3 * iters) / 4);
  for (int t = 1; t <= iters; ++t) {
    const MatrixXd mq = moment_mismatch(fs, q);
    const linalg::SpectralResult top = linalg::spectral_norm_warm(mq, eig_warm);
    if (top.value < best_val) {
      best_val = top.value;
      best_q = q;
    }
    if (t == checkpoint) best_at_checkpoint = best_val;
    const double sign = top.eigenvalue >= 0.0 ? 1.0 : -1.0;
    VectorXd grad(m);
    const VectorXd proj = fs.source * top.vector;
    for (Index i = 0; i < m; ++i) grad[i] = sign * proj[i] * proj[i];
    q = optim::project_simplex(q - (step_c / std::sqrt(static_cast<double>(t))) * grad);
    out.iterations = t;
  }
  const double final_val =
      linalg::spectral_norm_warm(moment_mismatch(fs, q), eig_warm).value;
  if (final_val < best_val) {
    best_val = final_val;
    best_q = q;
  }
  // Still improving over the last quarter of the budget: flag the best
  // iterate as a MaxIter result rather than a settled one.
  out.converged =
      best_at_checkpoint - best_val <= 1e-8 * (1.0 + best_at_checkpoint);
  out.q_min.weights = best_q;
  out.q_min.simplex_flag = true;
  out.disc_value = cap_sq * best_val;
  return out;
}

double generalized_disc_lower_bound(
    const std::vector<learner::Hypothesis>& h_grid,
    const std::vector<learner::Hypothesis>& surrogate_samples,
    const std::function<double(const learner::Hypothesis&)>& reweight_loss,
    const data::Dataset& ds) {
  require(!h_grid.empty() && !surrogate_samples.empty(), ErrorCode::InvalidArgument,
          "generalized_disc_lower_bound needs nonempty grids");
  const double n = static_cast<double>(ds.n());
  std::vector<VectorXd> sample_preds;
  sample_preds.reserve(surrogate_samples.size());
  for (const auto& h : surrogate_samples)
    sample_preds.push_back(learner::predict(h, ds.target_x));
  double best = 0.0;
  for (const auto& h : h_grid) {
    const VectorXd vh = learner::predict(h, ds.target_x);
    const double rl = reweight_loss(h);
    for (const auto& vs : sample_preds) {
      const double loss = (vh - vs).squaredNorm() / n;
      best = std::max(best, std::abs(loss - rl));
    }
  }
  return best;
}

namespace {

// Chebyshev fit min t1 + t2 with |f_P - w.x'| <= t1 on T and |y - w.x| <= t2
// on S, as a QP with ridge `ridge` on w.
struct ChebyshevFit {
  VectorXd w;
  double value = 0.0;
};

ChebyshevFit eta_lp(const data::Dataset& ds, const VectorXd& target_labels,
                    double ridge) {
  const Index d = ds.dim(), m = ds.m(), n = ds.n();
  const Index v = d + 2;
  optim::QPProblem qp;
  qp.p = MatrixXd::Zero(v, v);
  qp.p.topLeftCorner(d, d) = 2.0 * ridge * MatrixXd::Identity(d, d);
  qp.c = VectorXd::Zero(v);
  qp.c[d] = 1.0;
  qp.c[d + 1] = 1.0;
  qp.aineq.setZero(2 * (m + n), v);
  qp.bineq.resize(2 * (m + n));
  Index r = 0;
  for (Index j = 0; j < n; ++j) {
    // +-(f_P(x'_j) - w.x'_j) <= t1
    qp.aineq.block(r, 0, 1, d) = -ds.target_x.row(j);
    qp.aineq(r, d) = -1.0;
    qp.bineq[r++] = -target_labels[j];
    qp.aineq.block(r, 0, 1, d) = ds.target_x.row(j);
    qp.aineq(r, d) = -1.0;
    qp.bineq[r++] = target_labels[j];
  }
  for (Index i = 0; i < m; ++i) {
    qp.aineq.block(r, 0, 1, d) = -ds.source_x.row(i);
    qp.aineq(r, d + 1) = -1.0;
    qp.bineq[r++] = -ds.source_y[i];
    qp.aineq.block(r, 0, 1, d) = ds.source_x.row(i);
    qp.aineq(r, d + 1) = -1.0;
    qp.bineq[r++] = ds.source_y[i];
  }
  const optim::SolveReport rep = optim::solve_qp(qp);
  require(rep.status != optim::SolveStatus::Infeasible, ErrorCode::Solve,
          "eta_h LP cannot be infeasible (zero hypothesis is feasible)");
  ChebyshevFit fit;
  fit.w = rep.x.head(d);
  fit.value = rep.x[d] + rep.x[d + 1];
  return fit;
}

}  // namespace

EtaResult eta_h_detail(const data::Dataset& ds, const VectorXd& target_labels,
                       const HypothesisClassSpec& hclass) {
  require(hclass.kernel.kind == kernels::KernelKind::Linear, ErrorCode::InvalidArgument,
          "eta_h is defined for the linear kernel");
  require(target_labels.size() == ds.n(), ErrorCode::Dimension,
          "eta_h needs f_P on the target sample");
  const double base_ridge = 1e-9;
  ChebyshevFit fit = eta_lp(ds, target_labels, base_ridge);
  if (fit.w.norm() <= hclass.lambda_cap) return {fit.value, fit.w};
  // Norm cap active: sweep the ridge upward until ||w|| <= Lambda; the sweep
  // value at the first feasible ridge upper-bounds the constrained optimum,
  // and tightening stops once the cap is met within 1%.
  double lo = base_ridge, hi = base_ridge;
  ChebyshevFit best = fit;
  for (int i = 0; i < 60 && best.w.norm() > hclass.lambda_cap; ++i) {
    hi *= 4.0;
    best = eta_lp(ds, target_labels, hi);
  }
  for (int i = 0; i < 50; ++i) {
    const double mid = std::sqrt(lo * hi);
    const ChebyshevFit trial = eta_lp(ds, target_labels, mid);
    if (trial.w.norm() <= hclass.lambda_cap) {
      hi = mid;
      best = trial;
      if (trial.w.norm() >= 0.99 * hclass.lambda_cap) break;
    } else {
      lo = mid;
    }
  }
  return {best.value, best.w};
}

double eta_h(const data::Dataset& ds, const VectorXd& target_labels,
             const HypothesisClassSpec& hclass) {
  return eta_h_detail(ds, target_labels, hclass).value;
}

double d_inf(const data::Dataset& ds, const VectorXd& target_labels,
             const std::vector<learner::Hypothesis>& surrogate_samples) {
  require(!surrogate_samples.empty(), ErrorCode::InvalidArgument,
          "d_inf needs at least one sampled surrogate");
  require(target_labels.size() == ds.n(), ErrorCode::Dimension,
          "d_inf needs f_P on the target sample");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : surrogate_samples) {
    const VectorXd pred = learner::predict(h, ds.target_x);
    best = std::min(best, (pred - target_labels).cwiseAbs().maxCoeff());
  }
  return best;
}

AdmissibilityReport mu_admissibility_suite(double p, double m_bound, long trials,
                                           std::uint64_t seed) {
  require(p >= 1.0, ErrorCode::InvalidArgument, "loss exponent must be >= 1");
  require(m_bound > 0.0, ErrorCode::InvalidArgument, "loss bound must be positive");
  Rng rng(seed);
  AdmissibilityReport rep;
  rep.trials = trials;
  const double width = std::pow(m_bound, 1.0 / p);  // keeps pairwise losses <= M
  const double mu = p * std::pow(m_bound, p - 1.0);
  const auto lp = [p](double a, double b) { return std::pow(std::abs(a - b), p); };
  const double slack = 1e-12;

  for (long t = 0; t < trials; ++t) {
    const double base = rng.uniform(-1.0, 1.0);
    const double x = base + rng.uniform01() * width;
    const double y = base + rng.uniform01() * width;
    const double z = base + rng.uniform01() * width;

    const double lhs1 = lp(x, z);
    const double rhs1 = std::pow(2.0, p - 1.0) * (lp(x, y) + lp(y, z));
    if (lhs1 > rhs1 + slack * (1.0 + rhs1)) ++rep.relaxed_triangle_violations;

    if (std::abs(lp(x, y) - lp(z, y)) > mu * std::abs(x - z) + slack * (1.0 + mu))
      ++rep.admissibility_violations;

    // Finite D over 4 points; h, h', h'' values within one width-window.
    double ld_hhp = 0.0, ld_hpp = 0.0, ld_hhpp = 0.0;
    double wsum = 0.0;
    double wts[4];
    for (double& w : wts) w = rng.uniform01() + 1e-3;
    for (double w : wts) wsum += w;
    for (int i = 0; i < 4; ++i) {
      const double c = rng.uniform(-1.0, 1.0);
      const double h = c + rng.uniform01() * width;
      const double hp = c + rng.uniform01() * width;
      const double hpp = std::max(h, hp) - rng.uniform01() * width;  // stays in range
      const double w = wts[i] / wsum;
      ld_hhp += w * lp(h, hp);
      ld_hpp += w * lp(hpp, hp);
      ld_hhpp += w * lp(h, hpp);
    }
    const double lhs3 = std::abs(ld_hhp - ld_hpp);
    const double rhs3 = mu * std::pow(ld_hhpp, 1.0 / p);
    if (lhs3 > rhs3 + slack * (1.0 + rhs3)) ++rep.holder_violations;
  }
  return rep;
}

}  // namespace gda::disc
