#include "acgp/kernel.hpp"

#include <cmath>

namespace acgp {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.2360679774997896;

// Squared distances via (||x||^2 + ||z||^2) - 2 x.z, clamped at zero so that
// rounding cannot produce a small negative value under the sqrt. The norm
// terms are added first, keeping the arithmetic symmetric in the arguments.
Eigen::MatrixXd squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                                  const Eigen::Ref<const Eigen::MatrixXd>& cols) {
  const Eigen::VectorXd row_sq = rows.rowwise().squaredNorm();
  const Eigen::VectorXd col_sq = cols.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = row_sq.replicate(1, cols.rows());
  d2.rowwise() += col_sq.transpose();
  d2.noalias() -= 2.0 * (rows * cols.transpose());
  return d2.cwiseMax(0.0);
}

}  // namespace

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "se" || name == "rbf" || name == "squared-exponential") {
    return KernelFamily::SquaredExponential;
  }
  if (name == "ou" || name == "ornstein-uhlenbeck" || name == "exponential") {
    return KernelFamily::OrnsteinUhlenbeck;
  }
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  throw std::invalid_argument("unknown kernel family: " + name);
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential: return "se";
    case KernelFamily::OrnsteinUhlenbeck: return "ou";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
  }
  throw std::logic_error("unreachable kernel family");
}

void KernelSpec::validate() const {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw std::invalid_argument("kernel lengthscale must be positive and finite");
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("kernel amplitude must be positive and finite");
  }
}

NoiseModel::NoiseModel(VarianceFn fn, double floor) : fn_(std::move(fn)), floor_(floor) {
  if (!(floor_ > 0.0) || !std::isfinite(floor_)) {
    throw std::invalid_argument("noise floor must be positive and finite");
  }
}

NoiseModel NoiseModel::homoskedastic(double sigma2) { return NoiseModel(VarianceFn(), sigma2); }

NoiseModel NoiseModel::heteroskedastic(VarianceFn sigma2_of_x, double sigma2_min) {
  if (!sigma2_of_x) throw std::invalid_argument("heteroskedastic noise requires a variance function");
  return NoiseModel(std::move(sigma2_of_x), sigma2_min);
}

double NoiseModel::at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (!fn_) return floor_;
  const double v = fn_(x);
  if (!(v >= floor_)) {
    throw std::invalid_argument("noise variance fell below its declared infimum");
  }
  return v;
}

Eigen::VectorXd NoiseModel::diagonal(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  Eigen::VectorXd out(X.rows());
  if (!fn_) {
    out.setConstant(floor_);
    return out;
  }
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = at(X.row(i).transpose());
  return out;
}

Eigen::MatrixXd kernel_block(const KernelSpec& spec,
                             const Eigen::Ref<const Eigen::MatrixXd>& rows,
                             const Eigen::Ref<const Eigen::MatrixXd>& cols) {
  spec.validate();
  if (rows.cols() != cols.cols()) {
    throw std::invalid_argument("kernel_block: input dimension mismatch");
  }
  const double theta = spec.amplitude;
  const double ell = spec.lengthscale;
  Eigen::MatrixXd d2 = squared_distances(rows, cols);

  switch (spec.family) {
    case KernelFamily::SquaredExponential:
      return theta * (-d2 / (2.0 * ell * ell)).array().exp().matrix();
    case KernelFamily::OrnsteinUhlenbeck:
      return theta * (-d2.cwiseSqrt() / ell).array().exp().matrix();
    case KernelFamily::Matern32: {
      const Eigen::ArrayXXd a = kSqrt3 * d2.cwiseSqrt().array() / ell;
      return (theta * (1.0 + a) * (-a).exp()).matrix();
    }
    case KernelFamily::Matern52: {
      const Eigen::ArrayXXd a = kSqrt5 * d2.cwiseSqrt().array() / ell;
      return (theta * (1.0 + a + a.square() / 3.0) * (-a).exp()).matrix();
    }
  }
  throw std::logic_error("unreachable kernel family");
}

Eigen::MatrixXd regularized_diag_block(const KernelSpec& spec,
                                       const NoiseModel& noise,
                                       const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.rows() == 0) throw std::invalid_argument("regularized_diag_block: empty block");
  Eigen::MatrixXd block = kernel_block(spec, X, X);
  block.diagonal() += noise.diagonal(X);
  return block;
}

}  // namespace acgp
