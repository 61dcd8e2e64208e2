#include "kernels.hpp"

#include "linalg.hpp"

#include <cmath>

namespace gda::kernels {

void validate(const KernelSpec& k) {
  if (k.kind == KernelKind::Gaussian)
    require(k.sigma > 0.0, ErrorCode::InvalidArgument,
            "Gaussian kernel bandwidth must be positive");
}

double eval(const KernelSpec& k, const Eigen::Ref<const Eigen::RowVectorXd>& x,
            const Eigen::Ref<const Eigen::RowVectorXd>& z) {
  require(x.size() == z.size(), ErrorCode::Dimension, "kernel input dimension mismatch");
  switch (k.kind) {
    case KernelKind::Linear:
      return x.dot(z);
    case KernelKind::Gaussian:
      return std::exp(-(x - z).squaredNorm() / (2.0 * k.sigma * k.sigma));
  }
  fail(ErrorCode::Internal, "unknown kernel kind");
}

MatrixXd gram(const KernelSpec& k, const MatrixXd& x, const MatrixXd& z) {
  validate(k);
  require(x.cols() == z.cols(), ErrorCode::Dimension,
          "gram: feature dimension mismatch");
  if (k.kind == KernelKind::Linear) {
    MatrixXd g = x * z.transpose();
    if (&x == &z || (x.rows() == z.rows() && x == z))
      g = 0.5 * (g + g.transpose().eval());  // exact symmetry for X = Z
    return g;
  }
  // Gaussian: |x - z|^2 = |x|^2 + |z|^2 - 2 x.z
  const VectorXd xn = x.rowwise().squaredNorm();
  const VectorXd zn = z.rowwise().squaredNorm();
  MatrixXd d2 = -2.0 * x * z.transpose();
  d2.colwise() += xn;
  d2.rowwise() += zn.transpose();
  const double inv = 1.0 / (2.0 * k.sigma * k.sigma);
  MatrixXd g = (-d2.array().max(0.0) * inv).exp();
  if (x.rows() == z.rows() && x == z) {
    g = 0.5 * (g + g.transpose().eval());
    g.diagonal().setOnes();
  }
  return g;
}

double r_squared(const KernelSpec& k, const data::Dataset& ds) {
  if (k.kind == KernelKind::Gaussian) return 1.0;
  double best = 0.0;
  for (Index i = 0; i < ds.m(); ++i)
    best = std::max(best, ds.source_x.row(i).squaredNorm());
  for (Index i = 0; i < ds.n(); ++i)
    best = std::max(best, ds.target_x.row(i).squaredNorm());
  for (Index i = 0; i < ds.s(); ++i)
    best = std::max(best, ds.target_labeled_x.row(i).squaredNorm());
  return best;
}

std::vector<double> sigma_grid(Index dim) {
  std::vector<double> grid;
  for (int e = -10; e <= 0; ++e)
    grid.push_back(std::ldexp(static_cast<double>(dim), e));
  return grid;
}

GramBundle normalized_bundle(const KernelSpec& kernel, const data::Dataset& ds,
                             const data::WeightVector& q) {
  data::validate(ds);
  data::validate(q, ds.m());
  require(q.simplex_flag, ErrorCode::InvalidArgument,
          "normalized_bundle requires simplex weights");
  GramBundle b;
  b.kernel = kernel;
  b.q = q;
  const double n = static_cast<double>(ds.n());
  const VectorXd sq = q.weights.cwiseSqrt();

  b.kt = gram(kernel, ds.target_x, ds.target_x) / n;
  MatrixXd ks_raw = gram(kernel, ds.source_x, ds.source_x);
  b.ks = sq.asDiagonal() * ks_raw * sq.asDiagonal();
  b.ks = 0.5 * (b.ks + b.ks.transpose().eval());
  b.kst = (gram(kernel, ds.target_x, ds.source_x) * sq.asDiagonal()) / std::sqrt(n);
  b.y_norm = sq.cwiseProduct(ds.source_y);

  require(linalg::psd_check(b.kt, 1e-8), ErrorCode::Internal,
          "normalized target kernel matrix is not PSD within tolerance");
  require(linalg::psd_check(b.ks, 1e-8), ErrorCode::Internal,
          "normalized source kernel matrix is not PSD within tolerance");
  return b;
}

}  // namespace gda::kernels
