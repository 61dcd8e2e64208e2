#include "linalg.hpp"

#include <cmath>

namespace gda::linalg {

SymEig sym_eig(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  require(es.info() == Eigen::Success, ErrorCode::Internal,
          "symmetric eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

MatrixXd sym_pinv(const MatrixXd& m, double cutoff_rel) {
  const SymEig e = sym_eig(m);
  const double cutoff = cutoff_rel * e.values.cwiseAbs().maxCoeff();
  VectorXd inv = VectorXd::Zero(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i)
    if (std::abs(e.values[i]) > cutoff) inv[i] = 1.0 / e.values[i];
  return e.vectors * inv.asDiagonal() * e.vectors.transpose();
}

MatrixXd sym_func(const MatrixXd& m, const std::function<double(double)>& f) {
  const SymEig e = sym_eig(m);
  VectorXd d(e.values.size());
  for (Index i = 0; i < d.size(); ++i) d[i] = f(e.values[i]);
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

MatrixXd range_projector(const MatrixXd& m, double cutoff_rel) {
  const SymEig e = sym_eig(m);
  const double cutoff = cutoff_rel * e.values.cwiseAbs().maxCoeff();
  VectorXd d = VectorXd::Zero(e.values.size());
  for (Index i = 0; i < d.size(); ++i)
    if (std::abs(e.values[i]) > cutoff) d[i] = 1.0;
  return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

double min_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::Internal,
          "symmetric eigendecomposition failed");
  return es.eigenvalues().minCoeff();
}

bool psd_check(const MatrixXd& m, double tol) {
  if (m.size() == 0) return true;
  const double k = static_cast<double>(m.rows());
  const double scale = std::max(1.0, m.trace() / k);
  return min_eigenvalue(m) >= -tol * scale;
}

namespace {

SpectralResult dense_extreme_pair(const MatrixXd& m) {
  SpectralResult out;
  const SymEig e = sym_eig(m);
  const Index last = e.values.size() - 1;
  const Index pick = (std::abs(e.values[0]) > std::abs(e.values[last])) ? 0 : last;
  out.eigenvalue = e.values[pick];
  out.value = std::abs(out.eigenvalue);
  out.vector = e.vectors.col(pick);
  out.converged = true;
  return out;
}

}  // namespace

SpectralResult spectral_norm_warm(const MatrixXd& m, VectorXd& warm, double tol,
                                  int max_iter) {
  const Index k = m.rows();
  SpectralResult out;
  if (k == 0) return out;
  if (warm.size() != k || warm.norm() < 1e-300) {
    // Deterministic start with mild index dependence so it is not orthogonal
    // to the dominant eigenvector of structured matrices.
    warm = VectorXd::Ones(k);
    for (Index i = 0; i < k; ++i) warm[i] += 1e-3 * static_cast<double>(i % 7);
    warm.normalize();
  }
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  VectorXd v = warm;
  double theta = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VectorXd w = m * v;
    const double wn = w.norm();
    if (wn < 1e-300 * scale) {
      // v is (numerically) in the null space; dominant eigenvalue may be 0.
      break;
    }
    w /= wn;
    theta = w.dot(m * w);
    const double residual = (m * w - theta * w).norm();
    v = w;
    out.iterations = it + 1;
    if (residual <= tol * scale) {
      out.converged = true;
      break;
    }
  }
  if (out.converged) {
    out.eigenvalue = theta;
    out.value = std::abs(theta);
    out.vector = v;
    warm = v;
    return out;
  }
  // Stalled iteration signals a degenerate/tied spectrum: dense fallback.
  out = dense_extreme_pair(m);
  warm = out.vector;
  return out;
}

SpectralResult spectral_norm(const MatrixXd& m, double tol, int max_iter) {
  VectorXd start;
  return spectral_norm_warm(m, start, tol, max_iter);
}

void add_gram_jitter(MatrixXd& m) {
  if (m.rows() == 0) return;
  const double jitter = 1e-10 * m.trace() / static_cast<double>(m.rows());
  if (jitter > 0.0) m.diagonal().array() += jitter;
}

}  // namespace gda::linalg
