#include "sdp.hpp"

#include "linalg.hpp"
#include "rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace gda;
using kernels::KernelKind;

namespace {

const kernels::KernelSpec kLinear{KernelKind::Linear, 1.0};

// Random well-conditioned trust-region instance over m source / n target
// points (Ks kept positive definite so the grid oracle is exact).
sdp::TrustRegionProblem random_tr(Rng& rng, Index m, Index n, bool zero_b = false) {
  data::Dataset ds;
  ds.source_x.resize(m, m);
  ds.target_x.resize(n, m);
  ds.source_y.resize(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) ds.source_x(i, j) = rng.gaussian(0.0, 1.0);
    ds.source_x(i, i) += 2.0;  // keeps Ks well-conditioned
    ds.source_y[i] = rng.gaussian(0.0, 1.0);
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) ds.target_x(i, j) = rng.gaussian(0.0, 1.0);
  ds.target_labeled_x.resize(0, m);
  ds.target_labeled_y.resize(0);
  const auto bundle =
      kernels::normalized_bundle(kLinear, ds, data::uniform_weights(m));
  sdp::TrustRegionProblem tr;
  tr.ks = bundle.ks;
  tr.kst = bundle.kst;
  tr.kt = bundle.kt;
  tr.y_norm = bundle.y_norm;
  tr.r = rng.uniform(0.4, 1.2);
  tr.b = VectorXd::Zero(n);
  if (!zero_b)
    for (Index i = 0; i < n; ++i) tr.b[i] = rng.gaussian(0.0, 0.8);
  return tr;
}

kernels::GramBundle bundle_of(Rng& rng, Index m, Index n) {
  // near-linear labels keep the weighted-loss ball nonempty at small radii
  // (the d = 1 linear span cannot absorb arbitrary label vectors)
  data::Dataset ds;
  ds.source_x.resize(m, 1);
  ds.target_x.resize(n, 1);
  ds.source_y.resize(m);
  const double slope = rng.uniform(-1.0, 1.0);
  for (Index i = 0; i < m; ++i) {
    ds.source_x(i, 0) = rng.uniform(0.3, 1.2);
    ds.source_y[i] = slope * ds.source_x(i, 0) + rng.gaussian(0.0, 0.02);
  }
  for (Index i = 0; i < n; ++i) ds.target_x(i, 0) = rng.uniform(0.0, 0.6);
  ds.target_labeled_x.resize(0, 1);
  ds.target_labeled_y.resize(0);
  return kernels::normalized_bundle(kLinear, ds, data::uniform_weights(m));
}

}  // namespace

TEST_CASE("inner_max_exact with r = 0 pins a to the least-squares solution") {
  Rng rng(113);
  sdp::TrustRegionProblem tr = random_tr(rng, 2, 2);
  tr.r = 0.0;
  const auto res = sdp::inner_max_exact(tr);
  const VectorXd pinned = linalg::sym_pinv(tr.ks) * tr.y_norm;
  CHECK((res.a_star - pinned).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(res.value == doctest::Approx(sdp::inner_primal_value(tr, pinned)));
}

TEST_CASE("inner_max_exact m = n = 2, b = 0 matches a 400x400 feasible grid") {
  Rng rng(127);
  for (int trial = 0; trial < 4; ++trial) {
    const sdp::TrustRegionProblem tr = random_tr(rng, 2, 2, true);
    const auto res = sdp::inner_max_exact(tr);
    // 400x400 polar grid of the feasible ellipsoid a = Ks^-1 (y + rho r w)
    const VectorXd center = tr.ks.inverse() * tr.y_norm;
    const MatrixXd ks_inv = tr.ks.inverse();
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 400; ++i) {
      const double rho = static_cast<double>(i) / 400.0;
      for (int j = 0; j < 400; ++j) {
        const double th = 2.0 * M_PI * j / 400.0;
        VectorXd w(2);
        w << std::cos(th), std::sin(th);
        const VectorXd a = center + rho * tr.r * (ks_inv * w);
        best = std::max(best, sdp::inner_primal_value(tr, a));
      }
    }
    CHECK(res.value == doctest::Approx(best).epsilon(1e-3));
    CHECK(res.value >= best - 1e-9);  // dual value upper-bounds the grid max
    CHECK(res.primal_gap < 1e-6);
  }
}

TEST_CASE("dual is unimodal: golden section agrees with a dense eta scan") {
  Rng rng(131);
  for (int trial = 0; trial < 4; ++trial) {
    const sdp::TrustRegionProblem tr = random_tr(rng, 3, 3);
    const auto res = sdp::inner_max_exact(tr);
    const double eta_min = sdp::inner_eta_min(tr);
    double best_eta = res.eta_star, best_val = res.value;
    for (int i = 0; i <= 40000; ++i) {
      const double eta = eta_min + 1e-9 +
                         (res.eta_star * 4.0 + 1.0) * static_cast<double>(i) / 40000.0;
      const double v = sdp::inner_dual_value(tr, eta);
      if (v < best_val - 1e-10 * (1.0 + std::abs(best_val))) {
        best_val = v;
        best_eta = eta;
      }
    }
    CHECK(std::abs(best_eta - res.eta_star) <= 1e-6 * (1.0 + res.eta_star));
    CHECK(best_val >= res.value - 1e-8 * (1.0 + std::abs(res.value)));
    CHECK(res.primal_gap <= 1e-6);
  }
}

TEST_CASE("outer_solve: the first step strictly decreases a nonoptimal start") {
  Rng rng(137);
  const auto bundle = bundle_of(rng, 3, 3);
  const double lambda = 0.1, r = 0.5;
  const double at_zero = sdp::outer_objective(bundle, lambda, r, VectorXd::Zero(3));
  const auto res = sdp::outer_solve_alternating(bundle, lambda, r, 60);
  CHECK(res.objective <= at_zero + 1e-12);
}

TEST_CASE("outer objective is finite and compact for every finite r") {
  Rng rng(139);
  const auto bundle = bundle_of(rng, 2, 2);
  for (double r : {0.1, 1.0, 10.0, 1e3}) {
    const double v = sdp::outer_objective(bundle, 0.05, r, VectorXd::Zero(2));
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("build_sdp shapes and Ktilde properties") {
  Rng rng(149);
  const auto bundle = bundle_of(rng, 3, 4);
  const auto p = sdp::build_sdp(bundle, 0.2, 0.7);
  CHECK(p.m == 3);
  CHECK(p.n == 4);
  CHECK(p.ktilde.rows() == 3);
  CHECK(linalg::psd_check(p.ktilde, 1e-8));
  // Ktilde <= Kst^T Kst in the PSD order (f(d) = d/(lambda + d) < 1)
  CHECK(linalg::psd_check(MatrixXd(p.kst_t_kst - p.ktilde), 1e-8));

  // block dimensions: (m+1), (m+1), (n+1) plus two scalar constraints
  const auto d = sdp::to_sdpa(p);
  REQUIRE(d.block_sizes.size() == 5);
  CHECK(d.block_sizes[0] == 4);
  CHECK(d.block_sizes[1] == 4);
  CHECK(d.block_sizes[2] == 5);
  CHECK(d.block_sizes[3] == -1);
  CHECK(d.block_sizes[4] == -1);
  CHECK(d.nvars == 3 + 3 + 6);
}

TEST_CASE("degenerate Kt = 0 collapses Ktilde and the recovery block") {
  kernels::GramBundle bundle;
  bundle.ks = MatrixXd::Identity(2, 2);
  bundle.kst = MatrixXd::Zero(2, 2);
  bundle.kt = MatrixXd::Zero(2, 2);
  bundle.y_norm = VectorXd::Ones(2);
  const auto p = sdp::build_sdp(bundle, 0.3, 0.5);
  CHECK(p.ktilde.cwiseAbs().maxCoeff() == 0.0);
  sdp::SdpCandidate cand;
  cand.z_mat = MatrixXd::Zero(2, 2);
  cand.z_vec = VectorXd::Zero(2);
  cand.beta = 0.4;
  const auto rep = sdp::check_sdp_candidate(p, cand);
  // third block reduces to diag(0, beta): PSD iff beta >= 0
  bool found = false;
  for (const auto& mg : rep.margins)
    if (mg.name == "recovery_block") {
      found = true;
      CHECK(mg.ok);
    }
  CHECK(found);
  sdp::SdpCandidate neg = cand;
  neg.beta = -0.1;
  const auto rep2 = sdp::check_sdp_candidate(p, neg);
  for (const auto& mg : rep2.margins)
    if (mg.name == "recovery_block") CHECK_FALSE(mg.ok);
}

TEST_CASE("all-zero candidate is feasible iff |y|^2 <= r^2") {
  Rng rng(151);
  const auto bundle = bundle_of(rng, 2, 2);
  const double y_sq = bundle.y_norm.squaredNorm();
  sdp::SdpCandidate zero;
  zero.z_mat = MatrixXd::Zero(2, 2);
  zero.z_vec = VectorXd::Zero(2);
  {
    const auto p = sdp::build_sdp(bundle, 0.1, std::sqrt(y_sq) * 1.05);
    CHECK(sdp::check_sdp_candidate(p, zero).feasible);
  }
  {
    const auto p = sdp::build_sdp(bundle, 0.1, std::sqrt(y_sq) * 0.9);
    const auto rep = sdp::check_sdp_candidate(p, zero);
    CHECK_FALSE(rep.feasible);
    for (const auto& mg : rep.margins)
      if (mg.name == "trace_constraint") CHECK_FALSE(mg.ok);
  }
}

TEST_CASE("negative nu is reported with a named margin") {
  Rng rng(157);
  const auto bundle = bundle_of(rng, 2, 2);
  const auto p = sdp::build_sdp(bundle, 0.1, 2.0);
  sdp::SdpCandidate cand;
  cand.z_mat = MatrixXd::Zero(2, 2);
  cand.z_vec = VectorXd::Zero(2);
  cand.nu = -0.5;
  const auto rep = sdp::check_sdp_candidate(p, cand);
  CHECK_FALSE(rep.feasible);
  bool named = false;
  for (const auto& mg : rep.margins)
    if (mg.name == "nu_nonneg" && !mg.ok) named = true;
  CHECK(named);
}

TEST_CASE("candidate from an inner solution passes weak duality") {
  Rng rng(163);
  for (int trial = 0; trial < 4; ++trial) {
    const auto bundle = bundle_of(rng, 2, 2);
    const double lambda = 0.1;
    const double r = rng.uniform(0.4, 0.9);
    const auto outer = sdp::outer_solve_alternating(bundle, lambda, r, 80);
    sdp::TrustRegionProblem tr;
    tr.ks = bundle.ks;
    tr.kst = bundle.kst;
    tr.kt = bundle.kt;
    tr.y_norm = bundle.y_norm;
    tr.r = r;
    tr.b = outer.b_coeffs;
    const auto inner = sdp::inner_max_exact(tr);
    const auto p = sdp::build_sdp(bundle, lambda, r);
    const auto cand = sdp::candidate_from_primal(p, inner.a_star, inner.eta_star);
    const auto rep = sdp::check_sdp_candidate(p, cand, 1e-6);
    CHECK(rep.objective <= outer.objective + 1e-5);
  }
}

TEST_CASE("Schur complement equivalence for the trust-region dual block") {
  Rng rng(167);
  const sdp::TrustRegionProblem tr = random_tr(rng, 2, 2);
  const MatrixXd big = tr.kst.transpose() * tr.kst;
  for (int trial = 0; trial < 100; ++trial) {
    const double eta = rng.uniform(0.0, 4.0);
    const double gamma = rng.uniform(-2.0, 4.0);
    const MatrixXd top = eta * tr.ks * tr.ks - 0.5 * big;
    const VectorXd col =
        0.5 * tr.kst.transpose() * (tr.kt * tr.b) - eta * tr.ks * tr.y_norm;
    MatrixXd blk(3, 3);
    blk.topLeftCorner(2, 2) = top;
    blk.block(0, 2, 2, 1) = col;
    blk.block(2, 0, 1, 2) = col.transpose();
    blk(2, 2) = eta * (tr.y_norm.squaredNorm() - tr.r * tr.r) + gamma;
    const bool block_psd = linalg::psd_check(blk, 1e-10);
    bool schur_psd = linalg::psd_check(top, 1e-10);
    if (schur_psd) {
      const VectorXd sol = linalg::sym_pinv(top) * col;
      // range condition + corner >= col^T top^+ col
      schur_psd = (top * sol - col).cwiseAbs().maxCoeff() < 1e-7 &&
                  blk(2, 2) >= col.dot(sol) - 1e-9;
    }
    CHECK(block_psd == schur_psd);
  }
}

TEST_CASE("SDPA export round-trips bit-exactly") {
  Rng rng(173);
  const auto bundle = bundle_of(rng, 3, 2);
  const auto p = sdp::build_sdp(bundle, 0.15, 0.6);
  const auto d = sdp::to_sdpa(p);
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "gda_sdpa_test.dat-s").string();
  sdp::export_sdpa(d, path);
  const auto back = sdp::import_sdpa(path);
  CHECK(sdp::sdpa_equal(d, back));
  // a second export of the import is byte-identical
  const std::string path2 =
      (fs::temp_directory_path() / "gda_sdpa_test2.dat-s").string();
  sdp::export_sdpa(back, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string s1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  fs::remove(path);
  fs::remove(path2);
}

TEST_CASE("export with no entries writes a header-only file") {
  sdp::SdpaData d;
  d.nvars = 2;
  d.block_sizes = {-1};
  d.c = VectorXd::Zero(2);
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "gda_sdpa_empty.dat-s").string();
  sdp::export_sdpa(d, path);
  const auto back = sdp::import_sdpa(path);
  CHECK(back.entries.empty());
  CHECK(back.nvars == 2);
  fs::remove(path);
}

TEST_CASE("nonzero entry count matches the assembled blocks") {
  Rng rng(179);
  const auto bundle = bundle_of(rng, 2, 2);
  const auto p = sdp::build_sdp(bundle, 0.2, 0.5);
  const auto d = sdp::to_sdpa(p);
  for (const auto& e : d.entries) CHECK(e.value != 0.0);
  // every entry is upper-triangular and within its block
  for (const auto& e : d.entries) {
    CHECK(e.i <= e.j);
    const Index bs = d.block_sizes[static_cast<size_t>(e.blkno - 1)];
    CHECK(e.j <= std::abs(bs));
  }
}

// Rebuilds each constraint block from the exported entries, F(x) =
// sum_i x_i F_i - F0 at a candidate point, and compares against the direct
// block evaluation; this pins the variable order and every matno index.
TEST_CASE("exported data reproduces the assembled blocks at a candidate") {
  Rng rng(811);
  const auto bundle = bundle_of(rng, 3, 2);
  const double lambda = 0.12, radius = 0.5;
  const auto p = sdp::build_sdp(bundle, lambda, radius);
  const auto d = sdp::to_sdpa(p);

  // a structured candidate from the exact inner path
  sdp::TrustRegionProblem tr;
  tr.ks = bundle.ks;
  tr.kst = bundle.kst;
  tr.kt = bundle.kt;
  tr.y_norm = bundle.y_norm;
  tr.r = radius;
  tr.b = VectorXd::Zero(2);
  const auto inner = sdp::inner_max_exact(tr);
  const auto cand = sdp::candidate_from_primal(p, inner.a_star, inner.eta_star);

  // flatten the candidate into the exported variable order
  const Index m = p.m;
  VectorXd x(d.nvars);
  x[0] = cand.alpha;
  x[1] = cand.beta;
  x[2] = cand.nu;
  for (Index l = 0; l < m; ++l) x[3 + l] = cand.z_vec[l];
  Index pos = 3 + m;
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i <= j; ++i) x[pos++] = cand.z_mat(i, j);

  // assemble F(x) per block from the entries
  std::vector<MatrixXd> blocks;
  for (Index bs : d.block_sizes)
    blocks.push_back(MatrixXd::Zero(std::abs(bs), std::abs(bs)));
  for (const auto& e : d.entries) {
    const double coef = e.matno == 0 ? -1.0 : x[e.matno - 1];
    MatrixXd& blk = blocks[static_cast<size_t>(e.blkno - 1)];
    blk(e.i - 1, e.j - 1) += coef * e.value;
    if (e.i != e.j) blk(e.j - 1, e.i - 1) += coef * e.value;
  }

  // direct evaluation path
  const auto rep = sdp::check_sdp_candidate(p, cand, 1e-7);
  REQUIRE(rep.margins.size() == 5);
  for (size_t b = 0; b < 3; ++b) {
    const double mineig_export = linalg::min_eigenvalue(blocks[b]);
    CHECK(mineig_export == doctest::Approx(rep.margins[b].value).epsilon(1e-8));
  }
  // scalar blocks: trace slack and nu
  CHECK(blocks[3](0, 0) == doctest::Approx(rep.margins[3].value).epsilon(1e-10));
  CHECK(blocks[4](0, 0) == doctest::Approx(rep.margins[4].value).epsilon(1e-12));

  // the exported objective c^T x equals the direct objective
  double obj = 0.0;
  for (Index i = 0; i < d.nvars; ++i) obj += d.c[i] * x[i];
  CHECK(obj == doctest::Approx(rep.objective).epsilon(1e-10));
}
