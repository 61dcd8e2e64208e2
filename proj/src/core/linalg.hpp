#pragma once

#include "types.hpp"

#include <functional>

namespace gda::linalg {

/// Eigendecomposition of a symmetric matrix (ascending eigenvalues).
struct SymEig {
  VectorXd values;
  MatrixXd vectors;
};

SymEig sym_eig(const MatrixXd& m);

/// Moore-Penrose inverse of a symmetric PSD-ish matrix via eigendecomposition.
/// Eigenvalues below cutoff_rel * max|eigenvalue| are treated as zero.
MatrixXd sym_pinv(const MatrixXd& m, double cutoff_rel = 1e-10);

/// Applies a scalar function to the spectrum: U f(D) U^T.
MatrixXd sym_func(const MatrixXd& m, const std::function<double(double)>& f);

/// Orthogonal projector onto range(m) with relative eigenvalue cutoff.
MatrixXd range_projector(const MatrixXd& m, double cutoff_rel = 1e-10);

/// min eigenvalue >= -tol * max(1, trace/k).
bool psd_check(const MatrixXd& m, double tol = 1e-8);

double min_eigenvalue(const MatrixXd& m);

struct SpectralResult {
  double value = 0.0;   // max |eigenvalue|
  VectorXd vector;      // unit eigenvector for the extreme eigenvalue
  double eigenvalue = 0.0;  // signed
  int iterations = 0;
  bool converged = false;
};

/// Largest-magnitude eigenpair of a symmetric matrix by power iteration with
/// a deterministic start; falls back to a dense eigensolve when the iteration
/// stalls (degenerate or near-tied spectrum).
SpectralResult spectral_norm(const MatrixXd& m, double tol = 1e-10,
                             int max_iter = 5000);

/// Like spectral_norm but reuses a caller-provided start vector (warm start
/// across related calls, e.g. subgradient iterations on a slowly moving M).
SpectralResult spectral_norm_warm(const MatrixXd& m, VectorXd& warm, double tol = 1e-10,
                                  int max_iter = 5000);

/// Relative symmetric jitter added before factorizing Gram-type matrices:
/// 1e-10 * trace/k on the diagonal.
void add_gram_jitter(MatrixXd& m);

}  // namespace gda::linalg
