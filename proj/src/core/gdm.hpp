#pragma once

#include "dataset.hpp"
#include "discrepancy.hpp"
#include "kernels.hpp"
#include "learner.hpp"
#include "qp.hpp"
#include "surrogate.hpp"
#include "types.hpp"

#include <cstdint>
#include <vector>

namespace gda::gdm {

/// Data of the sampled dual (k boundary hypotheses, n target points):
///   Y[i][j] = n^(-1/2) h_j(x'_i),  y'[i] = n^(-1) sum_j h_i(x'_j)^2,
/// so y'_i is exactly the squared norm of column i of Y.
struct GdmDual {
  MatrixXd y_mat;   // n x k
  VectorXd y_prime;  // k
  double lambda = 0.0;
  MatrixXd kt;  // n x n
};

/// Midrange surrogate loss over a finite boundary sample:
///   1/2 (max_i L_Phat(h, h_i) + min_{h' in hull} L_Phat(h, h'))
/// with the hull minimum computed as a simplex QP over hull coefficients.
double surrogate_loss(const learner::Hypothesis& h,
                      const std::vector<learner::Hypothesis>& samples,
                      const data::Dataset& ds);

/// Builds the dual QP of the sampled objective in variables (alpha, gamma,
/// beta): maximize
///   -(Y a + g/2)^T Kt (lI + Kt/2)^-1 (Y a + g/2) - 1/2 g^T Kt Kt^+ g + a^T y' - b
/// s.t. 1^T a = 1/2, 1 b >= -Y^T g, a >= 0, emitted as the equivalent
/// minimization (variable order alpha[k], gamma[n], beta).
std::pair<GdmDual, optim::QPProblem> assemble_dual(
    const MatrixXd& kt, const std::vector<learner::Hypothesis>& samples,
    const data::Dataset& ds, double lambda);

/// Reads the primal hypothesis off a dual solution:
///   a = (lambda I + Kt/2)^-1 (Y alpha + gamma/2),
/// anchored on the target points with the n^(-1/2) scale of the normalized
/// parameterization (h = n^(-1/2) sum_i a_i K(x'_i, .)).
learner::Hypothesis recover_hypothesis(const GdmDual& dual,
                                       const optim::SolveReport& solution,
                                       const MatrixXd& target_points,
                                       const kernels::KernelSpec& kernel);

/// Solves the dual QP in the range of Kt (gamma = U g over the kept
/// eigenvectors, an exact restriction since the objective and constraints
/// see gamma only through Kt and Y^T) and lifts the solution back to the
/// full variable order of the assembled problem. This is the solve gdm_fit
/// uses; it stays small and well-conditioned when Kt is low rank.
optim::SolveReport solve_dual(const GdmDual& dual, const optim::QPProblem& full);

struct GdmOptions {
  Index boundary_samples = 20;  // k per ball
  double lambda_center = 1e-6;
  int dm_iterations = 2000;
  double ball_exponent = 2.0;
  bool cap_with_hypothesis_norm = false;
  double lambda_cap = 1.0;  // Lambda for disc/dm and the optional cap
};

struct GdmFitResult {
  learner::Hypothesis hypothesis;
  double objective = 0.0;  // optimum of the sampled problem
  data::WeightVector q_min;
  std::vector<learner::Hypothesis> samples;
  int skipped_balls = 0;  // balls whose center was infeasible (empty disjunct)
  optim::SolveReport qp_report;
};

/// Fit with an explicit surrogate spec: center + sample each ball, pool the
/// samples, assemble and solve the dual, recover the hypothesis.
GdmFitResult gdm_fit(const data::Dataset& ds, const kernels::KernelSpec& kernel,
                     double lambda, const surrogate::SurrogateSpec& spec, Index k,
                     std::uint64_t seed, double lambda_center = 1e-6);

/// The default surrogate family: a q_min-weighted loss ball and a uniform
/// (Qhat) loss ball, both with membership "weighted L_p loss <= rho" (radius
/// parameter rho^(1/p)), sampled as separate groups and pooled.
surrogate::SurrogateSpec default_family(const data::Dataset& ds,
                                        const kernels::KernelSpec& kernel, double rho,
                                        const data::WeightVector& q_min,
                                        double exponent = 2.0);

/// Full pipeline: dm_minimize -> default family at rho -> gdm_fit.
GdmFitResult gdm_fit_auto(const data::Dataset& ds, const kernels::KernelSpec& kernel,
                          double lambda, double rho, std::uint64_t seed,
                          const GdmOptions& opts = {});

struct ValidateEntry {
  double r = 0.0;
  double mse_on_validation = 0.0;
  bool failed = false;
};

struct ValidateResult {
  double r_best = 0.0;
  learner::Hypothesis h_best;
  std::vector<ValidateEntry> table;
};

/// Scores gdm_fit_auto over a radius grid by MSE on the labeled target sample
/// T' and keeps the argmin (ties resolved toward the smaller radius).
ValidateResult validate_r(const data::Dataset& ds, const kernels::KernelSpec& kernel,
                          double lambda, const std::vector<double>& grid, Index k,
                          std::uint64_t seed, const GdmOptions& opts = {});

}  // namespace gda::gdm
