#include "linalg.hpp"
#include "rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace gda;

TEST_CASE("rng is reproducible and respects ranges") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform(0.2, 1.0);
    CHECK(u >= 0.2);
    CHECK(u < 1.0);
  }
}

TEST_CASE("rng gaussian moments") {
  Rng r(3);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = r.gaussian(0.0, 1.0);
    sum += g;
    sum_sq += g * g;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.03);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(9, 5) == derive_seed(9, 5));
}

TEST_CASE("spectral_norm on a diagonal matrix") {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = -5.0;
  const auto res = linalg::spectral_norm(m);
  CHECK(res.value == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(std::abs(res.vector[1]) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(res.vector[0]) < 1e-6);
}

TEST_CASE("spectral_norm of the identity") {
  const auto res = linalg::spectral_norm(MatrixXd::Identity(4, 4));
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral_norm matches a dense eigensolver on random symmetric input") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd a(8, 8);
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 8; ++j) a(i, j) = rng.gaussian(0.0, 1.0);
    MatrixXd m = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const double oracle = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(linalg::spectral_norm(m).value == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("psd_check basics") {
  CHECK(linalg::psd_check(MatrixXd::Identity(3, 3)));
  MatrixXd ind = MatrixXd::Zero(2, 2);
  ind(0, 0) = 1.0;
  ind(1, 1) = -1.0;
  CHECK_FALSE(linalg::psd_check(ind));
  Rng rng(5);
  MatrixXd a(6, 4);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 4; ++j) a(i, j) = rng.gaussian(0.0, 1.0);
  CHECK(linalg::psd_check(MatrixXd(a.transpose() * a)));
}

TEST_CASE("sym_pinv inverts on the range") {
  Rng rng(8);
  MatrixXd a(5, 3);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 3; ++j) a(i, j) = rng.gaussian(0.0, 1.0);
  const MatrixXd m = a * a.transpose();  // rank 3 PSD, 5x5
  const MatrixXd pinv = linalg::sym_pinv(m);
  CHECK((m * pinv * m - m).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((pinv * m * pinv - pinv).cwiseAbs().maxCoeff() < 1e-9);
}
