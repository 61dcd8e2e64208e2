#include "baselines.hpp"

#include "qp.hpp"
#include "rng.hpp"

#include <cmath>

namespace gda::baselines {

Eigen::RowVectorXd fe_map(const Eigen::RowVectorXd& x, Domain domain) {
  const Index d = x.size();
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(3 * d);
  out.head(d) = x;
  if (domain == Domain::Source)
    out.segment(d, d) = x;
  else
    out.tail(d) = x;
  return out;
}

MatrixXd fe_map_rows(const MatrixXd& x, Domain domain) {
  MatrixXd out = MatrixXd::Zero(x.rows(), 3 * x.cols());
  const Index d = x.cols();
  out.leftCols(d) = x;
  if (domain == Domain::Source)
    out.middleCols(d, d) = x;
  else
    out.rightCols(d) = x;
  return out;
}

double kmm_default_epsilon(Index m) {
  const double sm = std::sqrt(static_cast<double>(m));
  return sm / (sm - 1.0);
}

VectorXd kmm_weights(const data::Dataset& ds, const KmmConfig& cfg) {
  require(cfg.b_cap > 0.0, ErrorCode::InvalidArgument, "KMM cap must be positive");
  require(cfg.epsilon >= 0.0, ErrorCode::InvalidArgument, "KMM slack must be >= 0");
  const Index m = ds.m();
  const double mf = static_cast<double>(m);
  const double nf = static_cast<double>(ds.n());

  optim::QPProblem qp;
  qp.p = kernels::gram(cfg.kernel, ds.source_x, ds.source_x);
  qp.p = 0.5 * (qp.p + qp.p.transpose().eval());
  qp.p.diagonal().array() += 1e-8 * std::max(1.0, qp.p.trace() / mf);
  const MatrixXd cross = kernels::gram(cfg.kernel, ds.source_x, ds.target_x);
  qp.c = -(mf / nf) * cross.rowwise().sum();
  // |sum b / m - 1| <= eps as two rows.
  qp.aineq.setOnes(2, m);
  qp.aineq.row(1) *= -1.0;
  qp.bineq.resize(2);
  qp.bineq[0] = mf * (1.0 + cfg.epsilon);
  qp.bineq[1] = -mf * (1.0 - cfg.epsilon);
  qp.lb = VectorXd::Zero(m);
  qp.ub = VectorXd::Constant(m, cfg.b_cap);

  const optim::SolveReport rep = optim::solve_qp(qp);
  require(rep.status == optim::SolveStatus::Optimal, ErrorCode::Solve,
          "KMM quadratic program did not reach optimality");
  return rep.x.cwiseMax(0.0).cwiseMin(cfg.b_cap);
}

BaselineFit fit_baseline(Method method, const data::Dataset& ds,
                         const kernels::KernelSpec& kernel, double lambda,
                         const BaselineOptions& opts) {
  data::validate(ds);
  BaselineFit fit;
  switch (method) {
    case Method::Uniform: {
      const data::MergedSample merged = data::merge_augmented(ds);
      fit.hypothesis = learner::krr_fit(kernel, merged.x, merged.y,
                                        merged.weights.weights, lambda);
      return fit;
    }
    case Method::KMM: {
      KmmConfig cfg;
      cfg.kernel = kernel;
      // T' rows join the source side of the matching problem.
      data::Dataset ext = ds;
      if (ds.s() > 0) {
        const data::MergedSample merged = data::merge_augmented(ds);
        ext.source_x = merged.x;
        ext.source_y = merged.y;
        ext.target_labeled_x.resize(0, ds.dim());
        ext.target_labeled_y.resize(0);
      }
      cfg.epsilon = kmm_default_epsilon(ext.m());
      const VectorXd beta = kmm_weights(ext, cfg);
      // Scale 1/m keeps the weighted loss on the empirical-mean scale.
      fit.hypothesis = learner::krr_fit(kernel, ext.source_x, ext.source_y,
                                        beta / static_cast<double>(ext.m()), lambda);
      return fit;
    }
    case Method::DM: {
      disc::HypothesisClassSpec hclass{kernel, opts.dm_lambda_cap};
      const disc::DmResult dm =
          disc::dm_minimize(ds, hclass, opts.dm_iterations, opts.seed);
      fit.hypothesis = learner::krr_fit(kernel, ds.source_x, ds.source_y,
                                        dm.q_min.weights, lambda);
      return fit;
    }
    case Method::FE: {
      const Index rows = ds.m() + ds.s();
      MatrixXd x(rows, 3 * ds.dim());
      VectorXd y(rows);
      x.topRows(ds.m()) = fe_map_rows(ds.source_x, Domain::Source);
      y.head(ds.m()) = ds.source_y;
      if (ds.s() > 0) {
        x.bottomRows(ds.s()) = fe_map_rows(ds.target_labeled_x, Domain::Target);
        y.tail(ds.s()) = ds.target_labeled_y;
      }
      const VectorXd w = VectorXd::Constant(rows, 1.0 / static_cast<double>(rows));
      fit.hypothesis = learner::krr_fit(kernel, x, y, w, lambda);
      fit.fe_parameterized = true;
      return fit;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown baseline method");
}

VectorXd baseline_predict(const BaselineFit& fit, const MatrixXd& x) {
  if (!fit.fe_parameterized) return learner::predict(fit.hypothesis, x);
  return learner::predict(fit.hypothesis, fe_map_rows(x, Domain::Target));
}

double baseline_mse(const BaselineFit& fit, const MatrixXd& x, const VectorXd& y) {
  return (baseline_predict(fit, x) - y).squaredNorm() / static_cast<double>(x.rows());
}

}  // namespace gda::baselines
