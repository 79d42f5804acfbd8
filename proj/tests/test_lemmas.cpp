// Identities linking the blocked factorization to posterior quantities, plus
// the scalar inequalities the bound derivations rest on.
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "acgp/dense_linalg.hpp"
#include "acgp/exact_gp.hpp"
#include "test_helpers.hpp"

using namespace acgp;
using acgp::testing::random_instance;

TEST_CASE("squared Cholesky diagonal equals the one-step-back posterior variance") {
  Rng rng(51);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::Index n = 48;
    const auto instance = random_instance(rng, n);
    const NoiseModel noise = NoiseModel::homoskedastic(instance.sigma2);
    const ExactModel model(instance.kernel, MeanModel::zero(), noise, instance.X, instance.y);

    Eigen::MatrixXd k = regularized_diag_block(instance.kernel, noise, instance.X);
    chol_in_place(k);
    for (const Eigen::Index idx : {0, 1, 7, 23, 47}) {
      const Eigen::MatrixXd point = instance.X.row(idx);
      const double posterior_variance =
          model.posterior_cov(idx, point)(0, 0) + instance.sigma2;
      CHECK(k(idx, idx) * k(idx, idx) ==
            doctest::Approx(posterior_variance).epsilon(1e-8));
    }
  }
}

TEST_CASE("log-determinant is the sum of log conditional variances") {
  Rng rng(52);
  const Eigen::Index n = 32;
  const auto instance = random_instance(rng, n);
  const NoiseModel noise = NoiseModel::homoskedastic(instance.sigma2);
  const ExactModel model(instance.kernel, MeanModel::zero(), noise, instance.X, instance.y);

  Eigen::MatrixXd k = regularized_diag_block(instance.kernel, noise, instance.X);
  chol_in_place(k);

  double sum = 0.0;
  for (Eigen::Index idx = 0; idx < n; ++idx) {
    const Eigen::MatrixXd point = instance.X.row(idx);
    sum += std::log(model.posterior_cov(idx, point)(0, 0) + instance.sigma2);
  }
  CHECK(logdet_from_chol(k) == doctest::Approx(sum).epsilon(1e-8));
}

TEST_CASE("quadratic form is the sum of normalized squared errors") {
  Rng rng(53);
  const Eigen::Index n = 32;
  const auto instance = random_instance(rng, n);
  const NoiseModel noise = NoiseModel::homoskedastic(instance.sigma2);
  const ExactModel model(instance.kernel, MeanModel::zero(), noise, instance.X, instance.y);

  Eigen::MatrixXd k = regularized_diag_block(instance.kernel, noise, instance.X);
  chol_in_place(k);
  const Eigen::VectorXd alpha = forward_solve(k, instance.y);

  double sum = 0.0;
  for (Eigen::Index idx = 0; idx < n; ++idx) {
    const Eigen::MatrixXd point = instance.X.row(idx);
    const double variance = model.posterior_cov(idx, point)(0, 0) + instance.sigma2;
    const double mean = model.posterior_mean(idx, point)(0);
    sum += (instance.y[idx] - mean) * (instance.y[idx] - mean) / variance;
  }
  CHECK(quad_from_alpha(alpha) == doctest::Approx(sum).epsilon(1e-8));
}

TEST_CASE("log(c + b - a) >= log(c + b) - a/c for c > 0, b >= a >= 0") {
  Rng rng(54);
  for (int trial = 0; trial < 20000; ++trial) {
    const double c = 1e-6 + 10.0 * rng.uniform();
    const double b = 10.0 * rng.uniform();
    const double a = b * rng.uniform();
    CHECK(std::log(c + b - a) >= std::log(c + b) - a / c - 1e-12);
  }
}

TEST_CASE("x/(c + a - b) <= x(c + b)/(c(c + a)) for c > 0, x,b >= 0, a >= b") {
  Rng rng(55);
  for (int trial = 0; trial < 20000; ++trial) {
    const double c = 1e-6 + 10.0 * rng.uniform();
    const double x = 10.0 * rng.uniform();
    const double b = 10.0 * rng.uniform();
    const double a = b + 10.0 * rng.uniform();
    CHECK(x / (c + a - b) <= x * (c + b) / (c * (c + a)) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("nested index count has the closed form (n-t)((n+t-1)/2 - t0)") {
  Rng rng(56);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::int64_t t0 = static_cast<std::int64_t>(rng.integer(50));
    const std::int64_t t = t0 + static_cast<std::int64_t>(rng.integer(50));
    const std::int64_t n = t + static_cast<std::int64_t>(rng.integer(80));

    std::int64_t brute = 0;
    for (std::int64_t j = t + 1; j <= n; ++j) {
      for (std::int64_t i = t0 + 1; i <= j - 1; ++i) brute += 1;
    }
    // (n-t)(n+t-1-2*t0) is even, so the division is exact.
    const std::int64_t closed = (n - t) * (n + t - 1 - 2 * t0) / 2;
    CHECK(brute == closed);
  }
}
