#pragma once

#include "kernels.hpp"
#include "types.hpp"

#include <string>
#include <vector>

namespace gda::sdp {

/// Inner maximization of the exact objective:
///   max over a of 1/2 |Kst a|^2 - b^T Kt Kst a
///   subject to |Ks a - y_norm|^2 <= r^2.
struct TrustRegionProblem {
  MatrixXd ks;   // m x m
  MatrixXd kst;  // n x m
  MatrixXd kt;   // n x n
  VectorXd b;    // n
  VectorXd y_norm;  // m
  double r = 0.0;
};

struct InnerMaxResult {
  double value = 0.0;
  double eta_star = 0.0;
  VectorXd a_star;
  bool hard_case = false;  // boundary-eigenvector correction applied
  double primal_gap = 0.0;  // |primal(a_star) - value|
};

/// Solves the inner maximization through its one-dimensional Lagrangian dual
///   min over eta >= eta_min of
///     1/4 v(eta)^T (eta Ks^2 - 1/2 Kst^T Kst)^+ v(eta) - eta (|y|^2 - r^2),
///   v(eta) = 2 eta Ks y - Kst^T Kt b,
/// where eta_min is the smallest eta making the pencil PSD (a generalized
/// eigenvalue). The dual is convex in eta; a golden-section search over a
/// bracket [eta_min + 1e-12, eta_min * 1e6 + 1] with a dense-scan fallback
/// locates eta*, and the primal a* is reconstructed from stationarity (with
/// the standard boundary-eigenvector correction in the hard case).
InnerMaxResult inner_max_exact(const TrustRegionProblem& tr, double tol = 1e-8);

double inner_primal_value(const TrustRegionProblem& tr, const VectorXd& a);

/// The 1-D dual phi(eta) at a fixed multiplier (exposed for scan-style
/// verification of the golden-section minimizer).
double inner_dual_value(const TrustRegionProblem& tr, double eta);

/// Smallest eta making eta Ks^2 - 1/2 Kst^T Kst PSD (the dual's domain edge).
double inner_eta_min(const TrustRegionProblem& tr);

/// Convex companion: min over the same ball of |Kst a - Kt b|^2.
struct InnerMinResult {
  double value = 0.0;
  VectorXd a_star;
};
InnerMinResult inner_min(const TrustRegionProblem& tr, double tol = 1e-10);

struct OuterResult {
  VectorXd b_coeffs;  // n
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Minimizes the exact objective
///   lambda b^T Kt b + 1/2 (max-term(b) + min-term(b)),
/// with max-term(b) = max_{ball} |Kst a - Kt b|^2 evaluated via
/// inner_max_exact, min-term via inner_min, by subgradient descent with a
/// backtracking line search; the objective never increases over accepted
/// steps and the best iterate is returned.
OuterResult outer_solve_alternating(const kernels::GramBundle& bundle, double lambda,
                                    double r, int iters = 200);

/// Evaluates the exact objective at a given b (used by tests and the outer
/// loop).
double outer_objective(const kernels::GramBundle& bundle, double lambda, double r,
                       const VectorXd& b);

/// The constructed semidefinite program in variables (alpha, beta, nu, Z, z):
///   maximize 1/2 Tr(Kst^T Kst Z) - beta - alpha
///   s.t. [nu Ks^2 + 1/2 Kst^T Kst - 1/4 Ktilde,  nu Ks y + 1/4 Ktilde z;
///         (.)^T,                                 alpha + nu (|y|^2 - r^2)] >= 0
///        [Z, z; z^T, 1] >= 0
///        [lambda Kt + Kt^2, 1/2 Kt Kst z; (.)^T, beta] >= 0
///        Tr(Ks^2 Z) - 2 y^T Ks z + |y|^2 <= r^2,   nu >= 0,
/// with Ktilde = Kst^T Kt (lambda Kt + Kt^2)^+ Kt Kst. The program is held as
/// its ingredient matrices; blocks are assembled on demand.
struct SDPProblem {
  Index m = 0;
  Index n = 0;
  double lambda = 0.0;
  double r = 0.0;
  MatrixXd ks_sq;       // Ks^2
  MatrixXd kst_t_kst;   // Kst^T Kst
  MatrixXd ktilde;      // m x m
  VectorXd ks_y;        // Ks y
  double y_sq = 0.0;    // |y|^2
  MatrixXd kt_quad;     // lambda Kt + Kt^2
  MatrixXd kt_kst;      // Kt Kst (n x m)
};

SDPProblem build_sdp(const kernels::GramBundle& bundle, double lambda, double r);

struct SdpCandidate {
  double alpha = 0.0;
  double beta = 0.0;
  double nu = 0.0;
  MatrixXd z_mat;  // m x m symmetric
  VectorXd z_vec;  // m
};

struct SdpCheckReport {
  bool feasible = false;
  double objective = 0.0;
  struct Margin {
    std::string name;
    double value;  // >= 0 means satisfied (min eigenvalue or slack)
    bool ok;
  };
  std::vector<Margin> margins;
};

/// Evaluates every constraint of the program at a candidate point: PSD blocks
/// via the eigenvalue test, the trace inequality, and nu >= 0.
SdpCheckReport check_sdp_candidate(const SDPProblem& p, const SdpCandidate& cand,
                                   double tol = 1e-8);

/// Feasible candidate assembled from an inner solution a (Z = a a^T, z = a)
/// and multiplier nu, with alpha and beta at their minimal feasible values
/// (Schur complements of the first and third blocks).
SdpCandidate candidate_from_primal(const SDPProblem& p, const VectorXd& a, double nu);

/// Sparse SDPA interchange data: maximize c^T x subject to
/// sum_i x_i F_i - F0  block-diagonally PSD (negative block sizes mark
/// diagonal blocks). Entries store upper-triangle nonzeros.
struct SdpaData {
  Index nvars = 0;
  std::vector<Index> block_sizes;
  VectorXd c;
  struct Entry {
    Index matno;  // 0 = F0
    Index blkno;  // 1-based
    Index i, j;   // 1-based, i <= j
    double value;
  };
  std::vector<Entry> entries;
};

/// Variable order of the exported program: alpha, beta, nu, z(1..m),
/// vech(Z) in column-major upper-triangle order.
SdpaData to_sdpa(const SDPProblem& p);

void export_sdpa(const SdpaData& d, const std::string& path);
SdpaData import_sdpa(const std::string& path);
bool sdpa_equal(const SdpaData& a, const SdpaData& b);

}  // namespace gda::sdp
