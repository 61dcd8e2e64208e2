#pragma once

#include "dataset.hpp"
#include "discrepancy.hpp"
#include "kernels.hpp"
#include "learner.hpp"
#include "types.hpp"

namespace gda::baselines {

enum class Domain { Source, Target };

/// Feature augmentation into the shared/source/target blocks:
/// Source x -> (x, x, 0), Target x -> (x, 0, x).
Eigen::RowVectorXd fe_map(const Eigen::RowVectorXd& x, Domain domain);
MatrixXd fe_map_rows(const MatrixXd& x, Domain domain);

struct KmmConfig {
  double b_cap = 1000.0;               // per-weight cap B
  double epsilon = 0.0;                // mean-matching slack
  kernels::KernelSpec kernel;
};

/// The recommended slack sqrt(m)/(sqrt(m)-1).
double kmm_default_epsilon(Index m);

/// Kernel mean matching weights: minimize 1/2 b^T K b - kappa^T b with
/// kappa_i = (m/n) sum_j K(x_i, x'_j), subject to 0 <= b <= B and
/// |sum b / m - 1| <= eps.
VectorXd kmm_weights(const data::Dataset& ds, const KmmConfig& cfg);

enum class Method { Uniform, FE, KMM, DM };

struct BaselineOptions {
  int dm_iterations = 2000;
  double dm_lambda_cap = 1.0;
  std::uint64_t seed = 0;
};

struct BaselineFit {
  learner::Hypothesis hypothesis;
  bool fe_parameterized = false;  // predictions need the target-augmented map
};

/// Trains the requested baseline: Uniform and KMM extend the training set by
/// T' when present; DM reweights the source sample by q_min; FE trains on the
/// augmented source rows plus target-augmented T' rows.
BaselineFit fit_baseline(Method method, const data::Dataset& ds,
                         const kernels::KernelSpec& kernel, double lambda,
                         const BaselineOptions& opts = {});

/// Predictions on target-domain inputs (applies the FE target map if needed).
VectorXd baseline_predict(const BaselineFit& fit, const MatrixXd& x);

double baseline_mse(const BaselineFit& fit, const MatrixXd& x, const VectorXd& y);

}  // namespace gda::baselines
