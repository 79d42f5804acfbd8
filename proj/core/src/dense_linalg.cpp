#include "acgp/dense_linalg.hpp"

#include <cmath>
#include <string>

namespace acgp {

NotPositiveDefiniteError::NotPositiveDefiniteError(Eigen::Index index, double pivot)
    : std::runtime_error("matrix not positive definite: pivot " + std::to_string(pivot) +
                         " at index " + std::to_string(index)),
      index_(index),
      pivot_(pivot) {}

SingularTriangularError::SingularTriangularError(Eigen::Index index)
    : std::runtime_error("triangular matrix singular at index " + std::to_string(index)),
      index_(index) {}

void chol_in_place(Eigen::Ref<Eigen::MatrixXd> block, double jitter) {
  if (block.rows() != block.cols()) {
    throw std::invalid_argument("chol_in_place: block must be square");
  }
  const Eigen::Index n = block.rows();
  if (jitter != 0.0) block.diagonal().array() += jitter;

  // Left-looking column sweep; the trailing update of column j is a single
  // matrix-vector product against the already-final columns.
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = block(j, j) - block.row(j).head(j).squaredNorm();
    if (!(pivot > 0.0)) throw NotPositiveDefiniteError(j, pivot);
    pivot = std::sqrt(pivot);
    block(j, j) = pivot;
    const Eigen::Index below = n - j - 1;
    if (below > 0) {
      block.col(j).tail(below).noalias() -=
          block.bottomLeftCorner(below, j) * block.row(j).head(j).transpose();
      block.col(j).tail(below) /= pivot;
    }
  }
}

void solve_right_transposed(Eigen::Ref<Eigen::MatrixXd> T,
                            const Eigen::Ref<const Eigen::MatrixXd>& L) {
  if (L.rows() != L.cols()) {
    throw std::invalid_argument("solve_right_transposed: L must be square");
  }
  if (T.cols() != L.rows()) {
    throw std::invalid_argument("solve_right_transposed: column count mismatch");
  }
  for (Eigen::Index j = 0; j < L.rows(); ++j) {
    if (L(j, j) == 0.0) throw SingularTriangularError(j);
  }
  L.triangularView<Eigen::Lower>().transpose().solveInPlace<Eigen::OnTheRight>(T);
}

void symmetric_downdate(Eigen::Ref<Eigen::MatrixXd> C,
                        const Eigen::Ref<const Eigen::MatrixXd>& T) {
  if (C.rows() != C.cols()) {
    throw std::invalid_argument("symmetric_downdate: C must be square");
  }
  if (T.rows() != C.rows()) {
    throw std::invalid_argument("symmetric_downdate: row count mismatch");
  }
  C.selfadjointView<Eigen::Lower>().rankUpdate(T, -1.0);
}

void forward_solve_in_place(const Eigen::Ref<const Eigen::MatrixXd>& L,
                            Eigen::Ref<Eigen::VectorXd> v) {
  if (L.rows() != L.cols() || L.rows() != v.size()) {
    throw std::invalid_argument("forward_solve: dimension mismatch");
  }
  for (Eigen::Index j = 0; j < L.rows(); ++j) {
    if (L(j, j) == 0.0) throw SingularTriangularError(j);
  }
  L.triangularView<Eigen::Lower>().solveInPlace(v);
}

Eigen::VectorXd forward_solve(const Eigen::Ref<const Eigen::MatrixXd>& L,
                              const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::VectorXd out = v;
  forward_solve_in_place(L, out);
  return out;
}

double logdet_from_chol(const Eigen::Ref<const Eigen::MatrixXd>& L) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < L.rows(); ++j) {
    const double d = L(j, j);
    if (!(d > 0.0)) throw NotPositiveDefiniteError(j, d);
    acc += std::log(d);
  }
  return 2.0 * acc;
}

double quad_from_alpha(const Eigen::Ref<const Eigen::VectorXd>& alpha) {
  return alpha.squaredNorm();
}

FactorBuffer::FactorBuffer(Eigen::Index max_n) {
  if (max_n < 0) throw std::invalid_argument("FactorBuffer: negative capacity");
  a_.setZero(max_n, max_n);
  alpha_.setZero(max_n);
}

void FactorBuffer::set_processed(Eigen::Index s) {
  if (s < 0 || s > max_n() || s < processed_) {
    throw std::invalid_argument("FactorBuffer: invalid processed count");
  }
  processed_ = s;
  if (downdated_ < processed_) downdated_ = processed_;
}

void FactorBuffer::set_downdated(Eigen::Index t) {
  if (t < processed_ || t > max_n()) {
    throw std::invalid_argument("FactorBuffer: invalid downdated count");
  }
  downdated_ = t;
}

}  // namespace acgp
