#include "acgp/exact_gp.hpp"

#include <cmath>
#include <stdexcept>

namespace acgp {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

}  // namespace

ExactModel::ExactModel(KernelSpec kernel, MeanModel mean, NoiseModel noise,
                       Eigen::MatrixXd X, Eigen::VectorXd y)
    : kernel_(kernel), mean_(mean), noise_(std::move(noise)), x_(std::move(X)), y_(std::move(y)) {
  if (x_.rows() != y_.size()) {
    throw std::invalid_argument("ExactModel: X and y row counts differ");
  }
  if (x_.rows() == 0) throw std::invalid_argument("ExactModel: empty dataset");
  kernel_.validate();

  Eigen::MatrixXd k = regularized_diag_block(kernel_, noise_, x_);
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("ExactModel: factorization of the kernel matrix failed");
  }
  chol_ = llt.matrixL();
  alpha_ = chol_.triangularView<Eigen::Lower>().solve(
      (y_ - mean_.values(y_.size())).eval());
}

double ExactModel::logdet() const {
  return 2.0 * chol_.diagonal().array().log().sum();
}

double ExactModel::quad() const { return alpha_.squaredNorm(); }

double ExactModel::lml() const {
  return -0.5 * logdet() - 0.5 * quad() - 0.5 * static_cast<double>(size()) * kLog2Pi;
}

double ExactModel::prefix_logdet(Eigen::Index s) const {
  if (s < 0 || s > size()) throw std::invalid_argument("prefix_logdet: bad prefix");
  if (s == 0) return 0.0;
  // The leading principal block of a Cholesky factor is the factor of the
  // leading principal block of the matrix.
  return 2.0 * chol_.diagonal().head(s).array().log().sum();
}

double ExactModel::prefix_quad(Eigen::Index s) const {
  if (s < 0 || s > size()) throw std::invalid_argument("prefix_quad: bad prefix");
  return alpha_.head(s).squaredNorm();
}

Eigen::LLT<Eigen::MatrixXd> ExactModel::prefix_llt(Eigen::Index prefix) const {
  Eigen::MatrixXd k_pre = regularized_diag_block(kernel_, noise_, x_.topRows(prefix));
  Eigen::LLT<Eigen::MatrixXd> llt(k_pre);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("ExactModel: prefix factorization failed");
  }
  return llt;
}

Eigen::MatrixXd ExactModel::posterior_cov(Eigen::Index prefix,
                                          const Eigen::Ref<const Eigen::MatrixXd>& x_rest) const {
  if (prefix < 0 || prefix > size()) throw std::invalid_argument("posterior_cov: bad prefix");
  Eigen::MatrixXd k_rest = kernel_block(kernel_, x_rest, x_rest);
  if (prefix == 0) return k_rest;

  const auto llt = prefix_llt(prefix);
  Eigen::MatrixXd cross = kernel_block(kernel_, x_.topRows(prefix), x_rest);
  Eigen::MatrixXd solved = llt.matrixL().solve(cross);
  k_rest.noalias() -= solved.transpose() * solved;
  return k_rest;
}

Eigen::VectorXd ExactModel::posterior_mean(Eigen::Index prefix,
                                           const Eigen::Ref<const Eigen::MatrixXd>& x_rest) const {
  if (prefix < 0 || prefix > size()) throw std::invalid_argument("posterior_mean: bad prefix");
  Eigen::VectorXd out = mean_.values(x_rest.rows());
  if (prefix == 0) return out;

  const auto llt = prefix_llt(prefix);
  Eigen::MatrixXd cross = kernel_block(kernel_, x_.topRows(prefix), x_rest);
  Eigen::VectorXd centered = y_.head(prefix) - mean_.values(prefix);
  out.noalias() += cross.transpose() * llt.solve(centered);
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ExactModel::predict(
    Eigen::Index prefix, const Eigen::Ref<const Eigen::MatrixXd>& x_star) const {
  Eigen::VectorXd mean = posterior_mean(prefix, x_star);
  Eigen::VectorXd var(x_star.rows());
  if (prefix == 0) {
    var.setConstant(kernel_.amplitude);
  } else {
    const auto llt = prefix_llt(prefix);
    Eigen::MatrixXd cross = kernel_block(kernel_, x_.topRows(prefix), x_star);
    Eigen::MatrixXd solved = llt.matrixL().solve(cross);
    var = Eigen::VectorXd::Constant(x_star.rows(), kernel_.amplitude) -
          solved.colwise().squaredNorm().transpose();
  }
  var += noise_.diagonal(x_star);
  return {std::move(mean), std::move(var)};
}

BlockSnapshot ExactModel::brute_force_snapshot(Eigen::Index s, Eigen::Index t) const {
  if (s < 0 || s > t || t > size()) {
    throw std::invalid_argument("brute_force_snapshot: invalid block limits");
  }
  BlockSnapshot snap;
  snap.n_total = size();
  snap.processed = s;
  snap.logdet_processed = prefix_logdet(s);
  snap.quad_processed = prefix_quad(s);
  snap.noise_floor = noise_.floor();

  const Eigen::Index m = t - s;
  snap.noise = noise_.diagonal(x_.middleRows(s, m));
  if (m == 0) {
    snap.variances.resize(0);
    snap.covariances.resize(0);
    snap.residuals.resize(0);
    return snap;
  }

  Eigen::MatrixXd cov = posterior_cov(s, x_.middleRows(s, m));
  snap.variances = cov.diagonal() + snap.noise;
  snap.covariances.resize(m - 1);
  for (Eigen::Index j = 0; j + 1 < m; ++j) snap.covariances[j] = cov(j + 1, j);
  snap.residuals = y_.segment(s, m) - posterior_mean(s, x_.middleRows(s, m));
  return snap;
}

BoundsReport ExactModel::brute_force_bounds(Eigen::Index s, Eigen::Index t,
                                            const BoundsOptions& options) const {
  if (s == size() && t == size()) {
    return evaluate_bounds(brute_force_snapshot(s, t), options);
  }
  if (t - s < 2) {
    throw std::invalid_argument("brute_force_bounds: block needs at least two points");
  }
  return evaluate_bounds(brute_force_snapshot(s, t), options);
}

}  // namespace acgp
