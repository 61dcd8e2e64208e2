#include "gdm.hpp"

#include "linalg.hpp"
#include "rng.hpp"

#include <cmath>

namespace gda::gdm {

namespace {

MatrixXd sample_predictions(const std::vector<learner::Hypothesis>& samples,
                            const MatrixXd& target_x) {
  MatrixXd v(target_x.rows(), static_cast<Index>(samples.size()));
  for (size_t j = 0; j < samples.size(); ++j)
    v.col(static_cast<Index>(j)) = learner::predict(samples[j], target_x);
  return v;
}

}  // namespace

double surrogate_loss(const learner::Hypothesis& h,
                      const std::vector<learner::Hypothesis>& samples,
                      const data::Dataset& ds) {
  require(!samples.empty(), ErrorCode::InvalidArgument,
          "surrogate_loss needs at least one sample");
  const double n = static_cast<double>(ds.n());
  const VectorXd vh = learner::predict(h, ds.target_x);
  const MatrixXd v = sample_predictions(samples, ds.target_x);
  const Index k = v.cols();

  double max_term = 0.0;
  for (Index j = 0; j < k; ++j)
    max_term = std::max(max_term, (vh - v.col(j)).squaredNorm() / n);

  double min_term;
  if (k == 1) {
    min_term = (vh - v.col(0)).squaredNorm() / n;
  } else {
    // min over hull coefficients mu in the simplex of 1/n |vh - V mu|^2.
    optim::QPProblem qp;
    qp.p = (2.0 / n) * (v.transpose() * v);
    qp.p = 0.5 * (qp.p + qp.p.transpose().eval());
    qp.c = -(2.0 / n) * (v.transpose() * vh);
    qp.aeq = MatrixXd::Ones(1, k);
    qp.beq = VectorXd::Ones(1);
    qp.lb = VectorXd::Zero(k);
    const optim::SolveReport rep = optim::solve_qp(qp);
    min_term = (vh - v * rep.x).squaredNorm() / n;
  }
  return 0.5 * (max_term + min_term);
}

std::pair<GdmDual, optim::QPProblem> assemble_dual(
    const MatrixXd& kt, const std::vector<learner::Hypothesis>& samples,
    const data::Dataset& ds, double lambda) {
  require(!samples.empty(), ErrorCode::InvalidArgument, "assemble_dual needs k >= 1");
  require(lambda > 0.0, ErrorCode::InvalidArgument, "assemble_dual needs lambda > 0");
  const Index n = ds.n();
  require(kt.rows() == n && kt.cols() == n, ErrorCode::Dimension,
          "Kt shape does not match the target sample");
  const Index k = static_cast<Index>(samples.size());
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  GdmDual dual;
  dual.kt = kt;
  dual.lambda = lambda;
  dual.y_mat = sample_predictions(samples, ds.target_x) / sqrt_n;
  dual.y_prime.resize(k);
  for (Index i = 0; i < k; ++i) dual.y_prime[i] = dual.y_mat.col(i).squaredNorm();

  const MatrixXd a_mat =
      linalg::sym_func(kt, [lambda](double d) { return d / (lambda + 0.5 * d); });
  const MatrixXd b_mat = linalg::range_projector(kt);

  const Index v = k + n + 1;
  optim::QPProblem qp;
  qp.p = MatrixXd::Zero(v, v);
  const MatrixXd ay = a_mat * dual.y_mat;  // n x k
  qp.p.topLeftCorner(k, k) = 2.0 * dual.y_mat.transpose() * ay;
  qp.p.block(0, k, k, n) = ay.transpose();
  qp.p.block(k, 0, n, k) = ay;
  qp.p.block(k, k, n, n) = 0.5 * a_mat + b_mat;
  qp.p = 0.5 * (qp.p + qp.p.transpose().eval());
  qp.c = VectorXd::Zero(v);
  qp.c.head(k) = -dual.y_prime;
  qp.c[v - 1] = 1.0;

  qp.aeq = MatrixXd::Zero(1, v);
  qp.aeq.block(0, 0, 1, k).setOnes();
  qp.beq = VectorXd::Constant(1, 0.5);

  // First k rows: beta >= -(Y^T gamma); next k rows: alpha >= 0.
  qp.aineq = MatrixXd::Zero(2 * k, v);
  qp.bineq = VectorXd::Zero(2 * k);
  for (Index i = 0; i < k; ++i) {
    qp.aineq.block(i, k, 1, n) = -dual.y_mat.col(i).transpose();
    qp.aineq(i, v - 1) = -1.0;
  }
  qp.aineq.block(k, 0, k, k) = -MatrixXd::Identity(k, k);
  return {std::move(dual), std::move(qp)};
}

learner::Hypothesis recover_hypothesis(const GdmDual& dual,
                                       const optim::SolveReport& solution,
                                       const MatrixXd& target_points,
                                       const kernels::KernelSpec& kernel) {
  require(solution.status == optim::SolveStatus::Optimal, ErrorCode::Solve,
          "recover_hypothesis requires an Optimal dual solution");
  const Index k = dual.y_mat.cols();
  const Index n = dual.kt.rows();
  require(solution.x.size() == k + n + 1, ErrorCode::Dimension,
          "dual solution has unexpected length");
  require(target_points.rows() == n, ErrorCode::Dimension,
          "target point count does not match Kt");
  const VectorXd alpha = solution.x.head(k);
  const VectorXd gamma = solution.x.segment(k, n);
  const double lambda = dual.lambda;
  const VectorXd rhs = dual.y_mat * alpha + 0.5 * gamma;
  const MatrixXd inv =
      linalg::sym_func(dual.kt, [lambda](double d) { return 1.0 / (lambda + 0.5 * d); });

  learner::Hypothesis h;
  h.kernel = kernel;
  h.anchors = target_points;
  h.coeffs = inv * rhs;
  h.anchor_scale =
      VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  return h;
}

optim::SolveReport solve_dual(const GdmDual& dual, const optim::QPProblem& full) {
  const Index k = dual.y_mat.cols();
  const Index n = dual.kt.rows();
  const linalg::SymEig e = linalg::sym_eig(dual.kt);
  const double cutoff = 1e-10 * e.values.cwiseAbs().maxCoeff();
  std::vector<Index> keep;
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] > cutoff) keep.push_back(i);
  const Index rt = static_cast<Index>(keep.size());
  MatrixXd u(n, rt);
  VectorXd d(rt);
  for (Index i = 0; i < rt; ++i) {
    u.col(i) = e.vectors.col(keep[i]);
    d[i] = e.values[keep[i]];
  }
  const double lambda = dual.lambda;
  const MatrixXd y_red = u.transpose() * dual.y_mat;  // rt x k
  VectorXd fa(rt);
  for (Index i = 0; i < rt; ++i) fa[i] = d[i] / (lambda + 0.5 * d[i]);

  const Index v = k + rt + 1;
  optim::QPProblem qp;
  qp.p = MatrixXd::Zero(v, v);
  const MatrixXd ay = fa.asDiagonal() * y_red;  // rt x k
  qp.p.topLeftCorner(k, k) = 2.0 * y_red.transpose() * ay;
  qp.p.block(0, k, k, rt) = ay.transpose();
  qp.p.block(k, 0, rt, k) = ay;
  qp.p.block(k, k, rt, rt) =
      MatrixXd((0.5 * fa.array() + 1.0).matrix().asDiagonal());
  qp.p = 0.5 * (qp.p + qp.p.transpose().eval());
  qp.c = VectorXd::Zero(v);
  qp.c.head(k) = -dual.y_prime;
  qp.c[v - 1] = 1.0;
  qp.aeq = MatrixXd::Zero(1, v);
  qp.aeq.block(0, 0, 1, k).setOnes();
  qp.beq = VectorXd::Constant(1, 0.5);
  qp.aineq = MatrixXd::Zero(2 * k, v);
  qp.bineq = VectorXd::Zero(2 * k);
  for (Index i = 0; i < k; ++i) {
    qp.aineq.block(i, k, 1, rt) = -y_red.col(i).transpose();
    qp.aineq(i, v - 1) = -1.0;
  }
  qp.aineq.block(k, 0, k, k) = -MatrixXd::Identity(k, k);

  optim::SolveReport red = optim::solve_qp(qp);

  optim::SolveReport out = red;
  out.x.resize(k + n + 1);
  out.x.head(k) = red.x.head(k);
  out.x.segment(k, n) = u * red.x.segment(k, rt);
  out.x[k + n] = red.x[v - 1];
  out.kkt_residual = optim::kkt_residual(full, out.x, red.eq_multipliers,
                                         red.ineq_multipliers, VectorXd(), VectorXd());
  return out;
}

GdmFitResult gdm_fit(const data::Dataset& ds, const kernels::KernelSpec& kernel,
                     double lambda, const surrogate::SurrogateSpec& spec, Index k,
                     std::uint64_t seed, double lambda_center) {
  surrogate::validate(spec);
  require(lambda > 0.0, ErrorCode::InvalidArgument, "gdm_fit needs lambda > 0");

  GdmFitResult out;
  for (size_t b = 0; b < spec.balls.size(); ++b) {
    learner::Hypothesis center;
    try {
      center = surrogate::center_hypothesis(spec.balls[b], lambda_center);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::InfeasibleCenter) {
        ++out.skipped_balls;  // empty disjunct of the union family
        continue;
      }
      throw;
    }
    auto ball_samples = surrogate::sample_boundary_group(
        {spec.balls[b]}, spec.max_norm, center, k, derive_seed(seed, b));
    for (auto& h : ball_samples) out.samples.push_back(std::move(h));
  }
  require(!out.samples.empty(), ErrorCode::InfeasibleCenter,
          "every ball in the surrogate family is infeasible at this radius");

  const MatrixXd kt = kernels::gram(kernel, ds.target_x, ds.target_x) /
                      static_cast<double>(ds.n());
  auto [dual, qp] = assemble_dual(kt, out.samples, ds, lambda);
  out.qp_report = solve_dual(dual, qp);
  require(out.qp_report.status == optim::SolveStatus::Optimal, ErrorCode::Solve,
          "dual QP did not reach optimality");
  out.objective = -out.qp_report.objective;  // max value of the dual
  out.hypothesis = recover_hypothesis(dual, out.qp_report, ds.target_x, kernel);
  return out;
}

surrogate::SurrogateSpec default_family(const data::Dataset& ds,
                                        const kernels::KernelSpec& kernel, double rho,
                                        const data::WeightVector& q_min,
                                        double exponent) {
  require(rho > 0.0, ErrorCode::InvalidArgument, "family radius must be positive");
  surrogate::SurrogateSpec spec;
  surrogate::SurrogateBall qball;
  qball.kernel = kernel;
  qball.points = ds.source_x;
  qball.labels = ds.source_y;
  qball.weights = q_min;
  qball.p = exponent;
  // Membership is "weighted L_p loss <= rho", so the radius parameter of the
  // loss ball is rho^(1/p).
  qball.r = std::pow(rho, 1.0 / exponent);
  surrogate::SurrogateBall uball = qball;
  uball.weights = data::uniform_weights(ds.m());
  spec.balls = {std::move(qball), std::move(uball)};
  return spec;
}

GdmFitResult gdm_fit_auto(const data::Dataset& ds, const kernels::KernelSpec& kernel,
                          double lambda, double rho, std::uint64_t seed,
                          const GdmOptions& opts) {
  disc::HypothesisClassSpec hclass{kernel, opts.lambda_cap};
  const disc::DmResult dm =
      disc::dm_minimize(ds, hclass, opts.dm_iterations, derive_seed(seed, 0xd3));
  surrogate::SurrogateSpec spec =
      default_family(ds, kernel, rho, dm.q_min, opts.ball_exponent);
  if (opts.cap_with_hypothesis_norm) spec.max_norm = opts.lambda_cap;
  GdmFitResult out = gdm_fit(ds, kernel, lambda, spec, opts.boundary_samples, seed,
                             opts.lambda_center);
  out.q_min = dm.q_min;
  return out;
}

ValidateResult validate_r(const data::Dataset& ds, const kernels::KernelSpec& kernel,
                          double lambda, const std::vector<double>& grid, Index k,
                          std::uint64_t seed, const GdmOptions& opts) {
  require(ds.s() > 0, ErrorCode::EmptyValidation,
          "validate_r needs a labeled target sample");
  require(!grid.empty(), ErrorCode::InvalidArgument, "validate_r needs a nonempty grid");

  GdmOptions local = opts;
  local.boundary_samples = k;
  ValidateResult out;
  bool have_best = false;
  double best_mse = std::numeric_limits<double>::infinity();
  for (size_t gi = 0; gi < grid.size(); ++gi) {
    ValidateEntry entry;
    entry.r = grid[gi];
    try {
      GdmFitResult fit =
          gdm_fit_auto(ds, kernel, lambda, grid[gi], derive_seed(seed, gi), local);
      entry.mse_on_validation =
          learner::mse(fit.hypothesis, ds.target_labeled_x, ds.target_labeled_y);
      if (!have_best || entry.mse_on_validation < best_mse) {
        have_best = true;
        best_mse = entry.mse_on_validation;
        out.r_best = grid[gi];
        out.h_best = fit.hypothesis;
      }
    } catch (const Error&) {
      entry.failed = true;
      entry.mse_on_validation = std::numeric_limits<double>::quiet_NaN();
    }
    out.table.push_back(entry);
  }
  require(have_best, ErrorCode::Solve, "validate_r: every radius in the grid failed");
  return out;
}

}  // namespace gda::gdm
