#include "learner.hpp"

#include "linalg.hpp"

#include <cmath>

namespace gda::learner {

VectorXd predict(const Hypothesis& h, const MatrixXd& x) {
  require(x.cols() == h.anchors.cols(), ErrorCode::Dimension,
          "predict: input dimension does not match anchors");
  if (h.anchors.rows() == 0) return VectorXd::Zero(x.rows());
  return kernels::gram(h.kernel, x, h.anchors) * h.effective_coeffs();
}

double rkhs_norm_sq(const Hypothesis& h) {
  if (h.anchors.rows() == 0) return 0.0;
  const MatrixXd g = kernels::gram(h.kernel, h.anchors, h.anchors);
  const VectorXd c = h.effective_coeffs();
  return std::max(0.0, c.dot(g * c));
}

double rkhs_norm(const Hypothesis& h) { return std::sqrt(rkhs_norm_sq(h)); }

Hypothesis krr_fit(const kernels::KernelSpec& kernel, const MatrixXd& points,
                   const VectorXd& labels, const VectorXd& weights, double lambda) {
  require(lambda > 0.0, ErrorCode::InvalidArgument, "krr_fit requires lambda > 0");
  require(points.rows() == labels.size() && points.rows() == weights.size(),
          ErrorCode::Dimension, "krr_fit: points/labels/weights size mismatch");
  require(points.rows() >= 1, ErrorCode::InvalidArgument, "krr_fit: empty sample");
  require(weights.minCoeff() >= 0.0, ErrorCode::InvalidArgument,
          "krr_fit: weights must be nonnegative");
  require(weights.maxCoeff() > 0.0, ErrorCode::InvalidArgument,
          "krr_fit: at least one weight must be positive");

  MatrixXd g = kernels::gram(kernel, points, points);
  linalg::add_gram_jitter(g);
  const VectorXd sw = weights.cwiseSqrt();
  MatrixXd system = sw.asDiagonal() * g * sw.asDiagonal();
  system.diagonal().array() += lambda;
  Eigen::LDLT<MatrixXd> ldlt(system);
  require(ldlt.info() == Eigen::Success, ErrorCode::Solve,
          "krr_fit: singular system after jitter");
  const VectorXd z = ldlt.solve(sw.cwiseProduct(labels));
  require(z.allFinite(), ErrorCode::Solve, "krr_fit: solve produced non-finite values");

  Hypothesis h;
  h.kernel = kernel;
  h.anchors = points;
  h.coeffs = sw.cwiseProduct(z);
  return h;
}

NormBoundReport norm_bound_check(const Hypothesis& h, double mu, double r,
                                 double lambda) {
  NormBoundReport rep;
  rep.norm = rkhs_norm(h);
  rep.bound = std::sqrt(mu * r / lambda);
  rep.ok = rep.norm <= rep.bound + 1e-8;
  return rep;
}

double mse(const Hypothesis& h, const MatrixXd& x, const VectorXd& y) {
  require(x.rows() == y.size(), ErrorCode::Dimension, "mse: size mismatch");
  return (predict(h, x) - y).squaredNorm() / static_cast<double>(x.rows());
}

}  // namespace gda::learner
