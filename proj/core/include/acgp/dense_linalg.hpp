#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace acgp {

/// Thrown when a Cholesky pivot is not strictly positive. `index` is the
/// row within the factored block at which the failure occurred.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  NotPositiveDefiniteError(Eigen::Index index, double pivot);
  Eigen::Index index() const { return index_; }
  double pivot() const { return pivot_; }

 private:
  Eigen::Index index_;
  double pivot_;
};

class SingularTriangularError : public std::runtime_error {
 public:
  explicit SingularTriangularError(Eigen::Index index);
  Eigen::Index index() const { return index_; }

 private:
  Eigen::Index index_;
};

/// In-place Cholesky of a symmetric positive definite block. Only the lower
/// triangle is read; on return the lower triangle holds L with L L^T = block.
/// `jitter` is added to the diagonal before factorization when nonzero.
/// Sequential left-to-right column order; bit-reproducible.
void chol_in_place(Eigen::Ref<Eigen::MatrixXd> block, double jitter = 0.0);

/// T <- T L^{-T} in place, i.e. the unique solution of X L^T = T.
void solve_right_transposed(Eigen::Ref<Eigen::MatrixXd> T,
                            const Eigen::Ref<const Eigen::MatrixXd>& L);

/// C <- C - T T^T; only the lower triangle of C is written.
void symmetric_downdate(Eigen::Ref<Eigen::MatrixXd> C,
                        const Eigen::Ref<const Eigen::MatrixXd>& T);

/// Returns L^{-1} v.
Eigen::VectorXd forward_solve(const Eigen::Ref<const Eigen::MatrixXd>& L,
                              const Eigen::Ref<const Eigen::VectorXd>& v);
void forward_solve_in_place(const Eigen::Ref<const Eigen::MatrixXd>& L,
                            Eigen::Ref<Eigen::VectorXd> v);

/// 2 * sum(log diag(L)); requires a strictly positive diagonal.
double logdet_from_chol(const Eigen::Ref<const Eigen::MatrixXd>& L);

/// sum(alpha_i^2).
double quad_from_alpha(const Eigen::Ref<const Eigen::VectorXd>& alpha);

/// Reconstruction quality of chol_in_place: ||L L^T - K||_max stays below
/// kCholReconstructionFactor * n * eps * ||K||_max for SPD inputs. Checked by
/// the test suite on random instances.
inline constexpr double kCholReconstructionFactor = 16.0;

/// Working storage for one blocked decomposition, allocated once up front.
///
/// A single square buffer of side `max_n` whose lower triangle is
/// significant. Rows [0, processed) hold the Cholesky factor of the
/// regularized kernel matrix of the processed points; `alpha` holds
/// L^{-1} (y - mean) over the same range. Between the downdate and the block
/// factorization, rows [processed, downdated) hold the solved cross block T
/// in columns [0, processed) and the downdated block (posterior covariance
/// plus noise) in the trailing square, while the matching slice of `alpha`
/// holds the prediction residuals.
///
/// A buffer is owned by exactly one driver at a time; independent
/// decompositions may run concurrently on separate buffers.
class FactorBuffer {
 public:
  FactorBuffer() : FactorBuffer(0) {}
  explicit FactorBuffer(Eigen::Index max_n);

  Eigen::Index max_n() const { return a_.rows(); }
  Eigen::Index processed() const { return processed_; }
  Eigen::Index downdated() const { return downdated_; }

  Eigen::MatrixXd& matrix() { return a_; }
  const Eigen::MatrixXd& matrix() const { return a_; }
  Eigen::VectorXd& alpha() { return alpha_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

  /// Cholesky factor of the processed prefix (lower triangle significant).
  Eigen::Block<const Eigen::MatrixXd> chol_view() const {
    return a_.topLeftCorner(processed_, processed_);
  }
  Eigen::VectorBlock<const Eigen::VectorXd> alpha_view() const {
    return alpha_.head(processed_);
  }

  void set_processed(Eigen::Index s);
  void set_downdated(Eigen::Index t);

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd alpha_;
  Eigen::Index processed_ = 0;
  Eigen::Index downdated_ = 0;
};

}  // namespace acgp
