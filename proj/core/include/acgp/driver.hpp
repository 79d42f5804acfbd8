#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "acgp/bounds.hpp"
#include "acgp/dense_linalg.hpp"
#include "acgp/kernel.hpp"

namespace acgp {

enum class EstimatorMode { Midpoint, Extrapolation };

/// Configuration of one adaptive decomposition.
struct StopConfig {
  /// Relative-error target r. Zero disables stopping (the strict inequality
  /// in the stopping test can never hold), which turns the run into a plain
  /// blocked decomposition of the first max_points rows.
  double rtol = 0.1;
  /// Rows per block; must be even and >= 2. The final block may be shorter
  /// when max_points is not a multiple; if it has fewer than two rows it is
  /// processed without a stopping check.
  Eigen::Index block_size = 256;
  /// Cap on processed points (and the side of the preallocated buffer).
  /// Negative means the full dataset.
  Eigen::Index max_points = -1;
  EstimatorMode estimator_mode = EstimatorMode::Midpoint;
  AlphaMode alpha_mode = AlphaMode::CurrentBlock;
  UpperQuadMode uq_mode = UpperQuadMode::CutoffRemark;
  /// Added to diagonal blocks before factorization when nonzero. A failing
  /// pivot is always an error, never silently jittered.
  double jitter = 0.0;

  void validate(Eigen::Index n_total) const;
};

/// One bound evaluation along the decomposition.
struct BlockTrace {
  Eigen::Index block_end = 0;  // t
  BoundsReport report;
  BlockSnapshot snapshot;
  double elapsed_seconds = 0.0;  // since the start of the run
};

struct AcgpResult {
  /// Estimate of the full log-marginal likelihood. After a stop this is the
  /// configured estimator; when the loop exhausts max_points == N it is the
  /// exact value. When max_points < N and no stop occurred, the estimator
  /// mode is applied to the final state.
  double estimate = 0.0;
  bool stopped = false;
  Eigen::Index processed = 0;  // M: rows with a finished Cholesky factor
  FactorBuffer factor;
  std::vector<BlockTrace> trace;
  /// Combined LML-scale bounds at the stopping block (or the last evaluated
  /// block). Both equal `estimate` when no bounds were ever evaluated.
  std::pair<double, double> bounds_at_stop{0.0, 0.0};
  double logdet_processed = 0.0;  // log|K[:M,:M]|
  double quad_processed = 0.0;    // quadratic form of the processed prefix

  /// log p(y_{:M}), exact for the processed prefix.
  double lml_processed() const;
};

/// Source of kernel, noise and mean evaluations over index ranges of the
/// training set. The driver pulls blocks through this interface and never
/// requests an index beyond the last block it touched, so wrapping it is the
/// way to observe (or cap) kernel access.
class KernelSource {
 public:
  virtual ~KernelSource() = default;
  virtual Eigen::Index size() const = 0;
  /// k(X[r0:r1], X[c0:c1]) as a dense (r1-r0) x (c1-c0) block.
  virtual Eigen::MatrixXd cov_block(Eigen::Index r0, Eigen::Index r1,
                                    Eigen::Index c0, Eigen::Index c1) const = 0;
  virtual Eigen::VectorXd noise_diag(Eigen::Index b0, Eigen::Index b1) const = 0;
  virtual Eigen::VectorXd mean_values(Eigen::Index b0, Eigen::Index b1) const = 0;
  virtual double noise_floor() const = 0;
};

/// KernelSource backed by a KernelSpec/MeanModel/NoiseModel triple and a
/// fixed input matrix.
class DataKernelSource final : public KernelSource {
 public:
  DataKernelSource(KernelSpec kernel, MeanModel mean, NoiseModel noise,
                   const Eigen::Ref<const Eigen::MatrixXd>& X);

  Eigen::Index size() const override { return x_.rows(); }
  Eigen::MatrixXd cov_block(Eigen::Index r0, Eigen::Index r1,
                            Eigen::Index c0, Eigen::Index c1) const override;
  Eigen::VectorXd noise_diag(Eigen::Index b0, Eigen::Index b1) const override;
  Eigen::VectorXd mean_values(Eigen::Index b0, Eigen::Index b1) const override;
  double noise_floor() const override { return noise_.floor(); }

 private:
  KernelSpec kernel_;
  MeanModel mean_;
  NoiseModel noise_;
  Eigen::MatrixXd x_;
};

/// Blocked Cholesky of the regularized kernel matrix with per-block bound
/// evaluation and early stopping. Per block: build the cross-covariance
/// rows, triangular-solve them against the finished factor, build the
/// diagonal block plus noise, downdate, update the residual slice of alpha,
/// evaluate the bounds, and test the stopping rule; only if the run
/// continues is the block factorized and alpha forward-substituted.
AcgpResult acgp_run(const KernelSource& source, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const StopConfig& config);

AcgpResult acgp_run(const KernelSpec& kernel, const MeanModel& mean, const NoiseModel& noise,
                    const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y, const StopConfig& config);

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // includes observation noise
};

/// Subset-of-data posterior prediction from the processed prefix of a run.
/// X_train_prefix must be (a superset of) the rows the run processed, in the
/// same order. With processed == 0 this is the prior.
Prediction predict(const AcgpResult& result, const KernelSpec& kernel, const MeanModel& mean,
                   const NoiseModel& noise, const Eigen::Ref<const Eigen::MatrixXd>& X_train_prefix,
                   const Eigen::Ref<const Eigen::MatrixXd>& X_star);

/// Partial log-marginal likelihoods log p(y_{:n}) for n = 1..N from a single
/// full blocked decomposition.
Eigen::VectorXd lml_curve(const KernelSpec& kernel, const MeanModel& mean, const NoiseModel& noise,
                          const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          Eigen::Index block_size = 256);

}  // namespace acgp
