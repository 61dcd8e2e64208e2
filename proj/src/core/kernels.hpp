#pragma once

#include "dataset.hpp"
#include "types.hpp"

#include <vector>

namespace gda::kernels {

enum class KernelKind { Linear, Gaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  double sigma = 1.0;  // Gaussian bandwidth, > 0
};

void validate(const KernelSpec& k);

double eval(const KernelSpec& k, const Eigen::Ref<const Eigen::RowVectorXd>& x,
            const Eigen::Ref<const Eigen::RowVectorXd>& z);

/// Gram matrix K(X_i, Z_j); Gaussian kernel is exp(-|x-z|^2 / (2 sigma^2)).
MatrixXd gram(const KernelSpec& k, const MatrixXd& x, const MatrixXd& z);

/// sup_x K(x, x) over the dataset's support: 1 for Gaussian kernels,
/// max |x|^2 over all sample points for linear kernels.
double r_squared(const KernelSpec& k, const data::Dataset& ds);

/// Bandwidth grid sigma in {k*d : k = 2^-10, ..., 1} with d the data dimension.
std::vector<double> sigma_grid(Index dim);

/// The normalized kernel matrices used by the optimization modules:
///   Kt[i][j]  = n^-1 K(x'_i, x'_j)
///   Ks[i][j]  = q_i^(1/2) q_j^(1/2) K(x_i, x_j)
///   Kst[i][j] = n^(-1/2) q_j^(1/2) K(x'_i, x_j)
///   y_norm[i] = q_i^(1/2) y_i
struct GramBundle {
  MatrixXd kt;   // n x n
  MatrixXd ks;   // m x m
  MatrixXd kst;  // n x m
  VectorXd y_norm;
  data::WeightVector q;
  KernelSpec kernel;
};

GramBundle normalized_bundle(const KernelSpec& kernel, const data::Dataset& ds,
                             const data::WeightVector& q);

}  // namespace gda::kernels
