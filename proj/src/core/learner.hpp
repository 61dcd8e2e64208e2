#pragma once

#include "kernels.hpp"
#include "types.hpp"

namespace gda::learner {

/// Kernel expansion h(x) = sum_i coeffs_i * scale_i * K(anchors_i, x).
/// anchor_scale is empty for the plain parameterization (all ones); the
/// normalized parameterizations of the dual solvers set it explicitly.
struct Hypothesis {
  kernels::KernelSpec kernel;
  MatrixXd anchors;  // a x d
  VectorXd coeffs;   // a
  VectorXd anchor_scale;  // a or empty

  VectorXd effective_coeffs() const {
    return anchor_scale.size() ? VectorXd(coeffs.cwiseProduct(anchor_scale)) : coeffs;
  }
};

VectorXd predict(const Hypothesis& h, const MatrixXd& x);

/// RKHS norm ||h||_K from the anchor Gram matrix.
double rkhs_norm(const Hypothesis& h);
double rkhs_norm_sq(const Hypothesis& h);

/// Weighted kernel ridge regression: the exact minimizer of
///   lambda ||h||_K^2 + sum_i weights_i (h(x_i) - y_i)^2
/// over the span of K(points_i, .). Solved through the symmetric system
/// (lambda I + W^(1/2) G W^(1/2)) z = W^(1/2) y, coeffs = W^(1/2) z, which
/// stays well-posed for zero weights.
Hypothesis krr_fit(const kernels::KernelSpec& kernel, const MatrixXd& points,
                   const VectorXd& labels, const VectorXd& weights, double lambda);

struct NormBoundReport {
  double norm = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// Checks ||h||_K <= sqrt(mu R / lambda) for a ridge fit on simplex weights
/// (R bounds K(x, x) on the input space).
NormBoundReport norm_bound_check(const Hypothesis& h, double mu, double r,
                                 double lambda);

/// Weighted mean squared error of predictions against labels.
double mse(const Hypothesis& h, const MatrixXd& x, const VectorXd& y);

}  // namespace gda::learner
