#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace acgp {

/// Stationary covariance families. All are normalized so that
/// k(x, x) == amplitude for every input.
enum class KernelFamily {
  SquaredExponential,
  OrnsteinUhlenbeck,
  Matern32,
  Matern52,
};

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily family);

/// Hyperparameters of a stationary kernel.
///
/// k_SE(x, z)  = theta * exp(-||x - z||^2 / (2 l^2))
/// k_OU(x, z)  = theta * exp(-||x - z|| / l)
/// k_3/2(x, z) = theta * (1 + a) * exp(-a),            a = sqrt(3) ||x - z|| / l
/// k_5/2(x, z) = theta * (1 + a + a^2 / 3) * exp(-a),  a = sqrt(5) ||x - z|| / l
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double lengthscale = 1.0;  // l > 0
  double amplitude = 1.0;    // theta > 0

  void validate() const;
};

/// Observation-noise variance, either a single constant or a function of the
/// input with a declared strictly positive infimum.
class NoiseModel {
 public:
  using VarianceFn = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

  static NoiseModel homoskedastic(double sigma2);
  static NoiseModel heteroskedastic(VarianceFn sigma2_of_x, double sigma2_min);

  double at(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd diagonal(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

  /// inf_x sigma^2(x); equals sigma^2 itself in the homoskedastic case.
  double floor() const { return floor_; }
  bool is_homoskedastic() const { return !fn_; }

 private:
  NoiseModel(VarianceFn fn, double floor);

  VarianceFn fn_;  // empty => homoskedastic with variance floor_
  double floor_;
};

/// Prior mean, either identically zero or a constant.
class MeanModel {
 public:
  MeanModel() : value_(0.0) {}
  static MeanModel zero() { return MeanModel(); }
  static MeanModel constant(double c) {
    MeanModel m;
    m.value_ = c;
    return m;
  }

  double at(const Eigen::Ref<const Eigen::VectorXd>&) const { return value_; }
  Eigen::VectorXd values(Eigen::Index n) const { return Eigen::VectorXd::Constant(n, value_); }
  double value() const { return value_; }

 private:
  double value_;
};

/// Dense covariance block k(rows, cols). Entry (i, j) is k(rows_i, cols_j).
/// rows and cols must share the same column dimension.
Eigen::MatrixXd kernel_block(const KernelSpec& spec,
                             const Eigen::Ref<const Eigen::MatrixXd>& rows,
                             const Eigen::Ref<const Eigen::MatrixXd>& cols);

/// k(X, X) + Diag(sigma^2(X)); the block-diagonal piece of the regularized
/// kernel matrix. Rejects empty blocks.
Eigen::MatrixXd regularized_diag_block(const KernelSpec& spec,
                                       const NoiseModel& noise,
                                       const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace acgp
