#include <doctest.h>

#include <cmath>

#include "acgp/dense_linalg.hpp"
#include "test_helpers.hpp"

using namespace acgp;
using acgp::testing::random_spd;

TEST_CASE("1x1 Cholesky is the square root") {
  Eigen::MatrixXd m(1, 1);
  m << 4.0;
  chol_in_place(m);
  CHECK(m(0, 0) == 2.0);
}

TEST_CASE("Cholesky of the identity is the identity") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(5, 5);
  chol_in_place(m);
  CHECK((m - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Cholesky reconstructs the generating product") {
  Rng rng(21);
  const Eigen::MatrixXd b = rng.normal_matrix(8, 8);
  Eigen::MatrixXd m = b * b.transpose() + Eigen::MatrixXd::Identity(8, 8);
  const Eigen::MatrixXd original = m;
  chol_in_place(m);
  const Eigen::MatrixXd l = m.triangularView<Eigen::Lower>();
  const double err = (l * l.transpose() - original).cwiseAbs().maxCoeff();
  CHECK(err <= 1e-10 * original.cwiseAbs().maxCoeff());
  CHECK(l.diagonal().minCoeff() > 0.0);
}

TEST_CASE("Cholesky reconstruction stays within the documented factor") {
  Rng rng(22);
  const double eps = std::numeric_limits<double>::epsilon();
  for (const Eigen::Index n : {4, 16, 64}) {
    Eigen::MatrixXd m = random_spd(rng, n);
    const Eigen::MatrixXd original = m;
    chol_in_place(m);
    const Eigen::MatrixXd l = m.triangularView<Eigen::Lower>();
    const double err = (l * l.transpose() - original).cwiseAbs().maxCoeff();
    CHECK(err <= kCholReconstructionFactor * static_cast<double>(n) * eps *
                     original.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("non-positive pivot raises with the failing index") {
  Eigen::MatrixXd m(3, 3);
  m << 1.0, 0.0, 0.0,
       0.0, -2.0, 0.0,
       0.0, 0.0, 1.0;
  CHECK_THROWS_AS(chol_in_place(m), NotPositiveDefiniteError);
  Eigen::MatrixXd again(3, 3);
  again << 1.0, 0.0, 0.0,
           0.0, -2.0, 0.0,
           0.0, 0.0, 1.0;
  try {
    chol_in_place(again);
    FAIL("expected NotPositiveDefiniteError");
  } catch (const NotPositiveDefiniteError& error) {
    CHECK(error.index() == 1);
  }
}

TEST_CASE("jitter is an explicit opt-in") {
  Eigen::MatrixXd m(2, 2);
  m << 1e-14, 0.0,
       0.0, 1e-14;
  Eigen::MatrixXd copy = m;
  CHECK_NOTHROW(chol_in_place(copy, 1.0));
  CHECK(copy(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("solve_right_transposed against the identity is a no-op") {
  Eigen::MatrixXd t(1, 2);
  t << 2.0, 0.0;
  solve_right_transposed(t, Eigen::MatrixXd::Identity(2, 2));
  CHECK(t(0, 0) == 2.0);
  CHECK(t(0, 1) == 0.0);
}

TEST_CASE("solve_right_transposed re-multiplies back") {
  Rng rng(23);
  Eigen::MatrixXd l = random_spd(rng, 2);
  chol_in_place(l);
  Eigen::MatrixXd t = rng.normal_matrix(1, 2);
  const Eigen::MatrixXd original = t;
  solve_right_transposed(t, l);
  const Eigen::MatrixXd lower = l.triangularView<Eigen::Lower>();
  CHECK((t * lower.transpose() - original).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("solve_right_transposed validates shapes and singularity") {
  Eigen::MatrixXd t(1, 3);
  t.setOnes();
  CHECK_THROWS_AS(solve_right_transposed(t, Eigen::MatrixXd::Identity(2, 2)),
                  std::invalid_argument);
  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(solve_right_transposed(t, singular), SingularTriangularError);
}

TEST_CASE("downdate with zero factor leaves the block unchanged") {
  Rng rng(24);
  Eigen::MatrixXd c = random_spd(rng, 4);
  const Eigen::MatrixXd original = c;
  symmetric_downdate(c, Eigen::MatrixXd::Zero(4, 2));
  CHECK((c - original).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("2x2 downdate matches direct arithmetic") {
  Eigen::MatrixXd c = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd t(2, 1);
  t << 1.0, 1.0;
  symmetric_downdate(c, t);
  // lower triangle of 2I - t t^T
  CHECK(c(0, 0) == 1.0);
  CHECK(c(1, 0) == -1.0);
  CHECK(c(1, 1) == 1.0);
}

TEST_CASE("forward solve examples") {
  Eigen::VectorXd v(2);
  v << 3.0, -1.0;
  CHECK((forward_solve(Eigen::MatrixXd::Identity(2, 2), v) - v).norm() == 0.0);

  Eigen::MatrixXd l(2, 2);
  l << 2.0, 0.0,
       1.0, 1.0;
  Eigen::VectorXd rhs(2);
  rhs << 2.0, 2.0;
  const Eigen::VectorXd solution = forward_solve(l, rhs);
  CHECK(solution[0] == doctest::Approx(1.0));
  CHECK(solution[1] == doctest::Approx(1.0));
}

TEST_CASE("forward solve residuals on random systems") {
  Rng rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd l = random_spd(rng, 12);
    chol_in_place(l);
    const Eigen::VectorXd v = rng.normal_vector(12);
    const Eigen::VectorXd solution = forward_solve(l, v);
    const Eigen::MatrixXd lower = l.triangularView<Eigen::Lower>();
    CHECK((lower * solution - v).lpNorm<Eigen::Infinity>() <=
          1e-12 * v.lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("forward solve rejects singular triangles") {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd v(2);
  v.setOnes();
  CHECK_THROWS_AS(forward_solve(l, v), SingularTriangularError);
}

TEST_CASE("logdet and quad trivial values") {
  CHECK(logdet_from_chol(Eigen::MatrixXd::Identity(4, 4)) == 0.0);
  CHECK(quad_from_alpha(Eigen::VectorXd::Zero(7)) == 0.0);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(logdet_from_chol(bad), NotPositiveDefiniteError);
}

TEST_CASE("logdet and quad agree with an eigendecomposition oracle") {
  Rng rng(26);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd k = random_spd(rng, 16);
    const Eigen::VectorXd y = rng.normal_vector(16);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolver(k);
    const double logdet_oracle = eigensolver.eigenvalues().array().log().sum();
    const double quad_oracle = y.dot(eigensolver.operatorInverseSqrt() *
                                     (eigensolver.operatorInverseSqrt() * y));

    Eigen::MatrixXd l = k;
    chol_in_place(l);
    const Eigen::VectorXd alpha = forward_solve(l, y);
    CHECK(logdet_from_chol(l) == doctest::Approx(logdet_oracle).epsilon(1e-8));
    CHECK(quad_from_alpha(alpha) == doctest::Approx(quad_oracle).epsilon(1e-8));
  }
}

TEST_CASE("factor buffer tracks its counters") {
  FactorBuffer buffer(8);
  CHECK(buffer.max_n() == 8);
  CHECK(buffer.processed() == 0);
  buffer.set_processed(4);
  CHECK(buffer.downdated() == 4);
  buffer.set_downdated(6);
  CHECK_THROWS_AS(buffer.set_downdated(3), std::invalid_argument);
  CHECK_THROWS_AS(buffer.set_processed(9), std::invalid_argument);
}
