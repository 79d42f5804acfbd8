#pragma once

#include <Eigen/Dense>

#include "acgp/bounds.hpp"
#include "acgp/kernel.hpp"

namespace acgp {

/// Dense reference model: one full factorization of the regularized kernel
/// matrix, used as the oracle against which the blocked path is validated.
/// Deliberately built on a separate factorization routine (Eigen's LLT) so
/// agreement with the blocked engine is a genuine two-implementation check.
/// Cubic in N with no economies; intended for moderate N only.
///
/// Immutable after construction; concurrent reads are safe.
class ExactModel {
 public:
  ExactModel(KernelSpec kernel, MeanModel mean, NoiseModel noise,
             Eigen::MatrixXd X, Eigen::VectorXd y);

  Eigen::Index size() const { return x_.rows(); }
  const Eigen::MatrixXd& inputs() const { return x_; }
  const Eigen::VectorXd& targets() const { return y_; }
  const KernelSpec& kernel() const { return kernel_; }
  const MeanModel& mean() const { return mean_; }
  const NoiseModel& noise() const { return noise_; }
  const Eigen::MatrixXd& chol() const { return chol_; }

  /// log p(y) = -0.5 log|K| - 0.5 y^T K^{-1} y - (N/2) log 2 pi.
  double lml() const;
  double logdet() const;  // log|K|
  double quad() const;    // (y - mu)^T K^{-1} (y - mu)

  /// Same quantities for the leading prefix of the training set.
  double prefix_logdet(Eigen::Index s) const;
  double prefix_quad(Eigen::Index s) const;

  /// Posterior covariance of X_rest after conditioning on the first `prefix`
  /// training points, by the direct formula
  ///   K(X_rest, X_rest) - K(X_rest, X_pre) (K_pre + noise)^{-1} K(X_pre, X_rest).
  /// prefix == 0 yields the prior block. Noise of the rest points is NOT
  /// included.
  Eigen::MatrixXd posterior_cov(Eigen::Index prefix,
                                const Eigen::Ref<const Eigen::MatrixXd>& x_rest) const;

  /// Posterior mean of X_rest conditioned on the first `prefix` points.
  Eigen::VectorXd posterior_mean(Eigen::Index prefix,
                                 const Eigen::Ref<const Eigen::MatrixXd>& x_rest) const;

  /// Predictive mean and variance (including noise) at X_star from the first
  /// `prefix` training points.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> predict(
      Eigen::Index prefix, const Eigen::Ref<const Eigen::MatrixXd>& x_star) const;

  /// Rebuild the inputs of the bound evaluation from first principles for
  /// the block [s, t): prefix log-determinant and quadratic form by direct
  /// factorization, block variances/covariances from posterior_cov, and
  /// residuals from posterior_mean.
  BlockSnapshot brute_force_snapshot(Eigen::Index s, Eigen::Index t) const;

  /// brute_force_snapshot followed by evaluate_bounds. Requires t - s >= 2
  /// unless s == t == N (the collapse case).
  BoundsReport brute_force_bounds(Eigen::Index s, Eigen::Index t,
                                  const BoundsOptions& options = {}) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> prefix_llt(Eigen::Index prefix) const;

  KernelSpec kernel_;
  MeanModel mean_;
  NoiseModel noise_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd chol_;       // full lower factor of K + noise
  Eigen::VectorXd alpha_;      // chol^{-1} (y - mu)
};

}  // namespace acgp
