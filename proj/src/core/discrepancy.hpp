#pragma once

#include "dataset.hpp"
#include "kernels.hpp"
#include "learner.hpp"
#include "types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace gda::disc {

/// Kernel hypothesis ball H = {h : ||h||_K <= Lambda}.
struct HypothesisClassSpec {
  kernels::KernelSpec kernel;
  double lambda_cap = 1.0;  // Lambda > 0
};

/// Finite-dimensional feature embedding of the source and target samples.
/// Linear kernels use the raw coordinates; Gaussian kernels use the empirical
/// feature space spanned by the combined sample (eigendecomposition of the
/// joint Gram matrix, rank <= m+n), so one spectral code path serves both.
struct FeatureSpace {
  MatrixXd source;  // m x f
  MatrixXd target;  // n x f
};

FeatureSpace build_feature_space(const kernels::KernelSpec& kernel,
                                 const data::Dataset& ds);

/// Second-moment mismatch M(q) = sum_i q_i phi_i phi_i^T - n^-1 sum_j phi'_j phi'_j^T.
MatrixXd moment_mismatch(const FeatureSpace& fs, const VectorXd& q);

/// Empirical discrepancy for the L2 loss over H:
///   disc(q, Phat) = 4 Lambda^2 ||M(q)||_2.
/// (For h = <w, phi(x)>, L2 loss differences are (w - w')^T M (w - w'), and the
/// max over ||w||, ||w'|| <= Lambda of |(w - w')^T M (w - w')| is 4 Lambda^2
/// times the extreme |eigenvalue|.)
double disc_l2(const data::WeightVector& q, const data::Dataset& ds,
               const HypothesisClassSpec& hclass);

struct DmResult {
  data::WeightVector q_min;
  double disc_value = 0.0;
  bool converged = true;
  int iterations = 0;
};

/// Projected-subgradient minimization of q -> ||M(q)||_2 over the simplex.
/// Step c/sqrt(t) with c = 1/(4 Lambda^2 max_i |phi_i|^2); the subgradient at
/// q is sign(theta) * ((u^T phi_i)^2)_i with (theta, u) the extreme eigenpair.
/// Returns the best iterate; deterministic given the seed. An optional warm
/// start joins the candidate set, so its value is never exceeded.
DmResult dm_minimize(const data::Dataset& ds, const HypothesisClassSpec& hclass,
                     int iters = 2000, std::uint64_t seed = 0,
                     const VectorXd* warm_start = nullptr);

/// Finite-grid lower bound of the generalized discrepancy DISC(Phat, U):
/// max over h in h_grid, h'' in samples of |L_Phat(h, h'') - reweight_loss(h)|.
double generalized_disc_lower_bound(
    const std::vector<learner::Hypothesis>& h_grid,
    const std::vector<learner::Hypothesis>& surrogate_samples,
    const std::function<double(const learner::Hypothesis&)>& reweight_loss,
    const data::Dataset& ds);

/// eta_H(f_P, f_Q): min over h0 in H of
///   max_{x in supp(Phat)} |f_P(x) - h0(x)| + max_{x in supp(Qhat)} |f_Q(x) - h0(x)|.
/// target_labels carries f_P on the target sample (oracle mode). Linear
/// kernel only; solved as a Chebyshev LP in (w, t1, t2) through the QP solver
/// with a vanishing ridge, with a penalty sweep when ||w|| exceeds Lambda.
double eta_h(const data::Dataset& ds, const VectorXd& target_labels,
             const HypothesisClassSpec& hclass);

struct EtaResult {
  double value = 0.0;
  VectorXd w;  // the fitted reference hypothesis (linear coefficients)
};

/// eta_H together with its minimizing hypothesis (the bound-comparison
/// diagnostics need the radius max_{x in supp(Qhat)} |f_Q - h0*|).
EtaResult eta_h_detail(const data::Dataset& ds, const VectorXd& target_labels,
                       const HypothesisClassSpec& hclass);

/// Upper bound of d_inf^Phat(f_P, H''): min over sampled h0 of
/// max_{x in supp(Phat)} |h0(x) - f_P(x)|.
double d_inf(const data::Dataset& ds, const VectorXd& target_labels,
             const std::vector<learner::Hypothesis>& surrogate_samples);

struct AdmissibilityReport {
  long trials = 0;
  long relaxed_triangle_violations = 0;  // L_p(x,z) <= 2^(p-1)(L_p(x,y)+L_p(y,z))
  long admissibility_violations = 0;     // |L(u,y)-L(u',y)| <= p M^(p-1)|u-u'|
  long holder_violations = 0;  // |L_D(h,h')-L_D(h'',h')| <= p M^(p-1) L_D(h,h'')^(1/p)
};

/// Randomized verification of the L_p loss inequalities, with all function
/// values drawn so that every pairwise loss stays below M.
AdmissibilityReport mu_admissibility_suite(double p, double m_bound, long trials,
                                           std::uint64_t seed);

}  // namespace gda::disc
