#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <vector>

#include "acgp/driver.hpp"
#include "acgp/kernel.hpp"

namespace acgp {

/// Hyperparameters in log space: positivity for free, and additive steps act
/// multiplicatively on the natural scale.
struct HyperParams {
  double log_lengthscale = 0.0;
  double log_amplitude = 0.0;
  double log_noise = 0.0;

  KernelSpec kernel(KernelFamily family) const;
  NoiseModel noise() const;
  Eigen::Vector3d as_vector() const;
  static HyperParams from_vector(const Eigen::Vector3d& v);
};

struct TuneConfig {
  int max_restarts = 5;
  int max_steps_per_restart = 40;
  /// Central finite-difference step in log space.
  double fd_step = 1e-4;
  /// Initial line-search step; halved until the objective decreases.
  double initial_step = 0.5;
  int max_backtracks = 20;
  double wall_clock_budget_seconds = std::numeric_limits<double>::infinity();

  Eigen::Index block_size = 256;
  Eigen::Index max_points = -1;

  /// Convergence tolerance of restart k (0-based) on the relative objective
  /// change; the stopping tolerance r of the underlying decomposition is set
  /// to the same value.
  static double tolerance(int restart) { return std::pow(2.0 / 3.0, restart + 1); }
};

struct ObjectiveValue {
  double value = std::numeric_limits<double>::infinity();  // negative LML estimate
  Eigen::Index points_used = 0;                            // M of the underlying run
};

/// Negative log-marginal-likelihood estimate at the given hyperparameters,
/// from an adaptive run with relative-error target r and the extrapolation
/// estimator (cheap and smooth in the hyperparameters). A failed
/// factorization yields +infinity so the step is rejected.
ObjectiveValue objective(const HyperParams& params, KernelFamily family,
                         const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y, double rtol,
                         const TuneConfig& config);

struct TuneStep {
  double elapsed_seconds = 0.0;
  int restart = 0;
  HyperParams params;
  double objective = 0.0;
  Eigen::Index points_used = 0;
  std::optional<double> exact_lml;  // filled by the experiment harness only
};

struct TuneResult {
  std::vector<TuneStep> trajectory;  // every accepted step, including the start
  HyperParams best;
  double best_objective = std::numeric_limits<double>::infinity();
  bool budget_exhausted = false;
};

/// Gradient descent with backtracking line search on central
/// finite-difference gradients of the objective. Restart k runs until the
/// relative objective change drops below tolerance(k), then tightens both
/// the tolerance and the decomposition's r. Accepted steps never increase
/// the objective.
TuneResult tune(KernelFamily family, const Eigen::Ref<const Eigen::MatrixXd>& X,
                const Eigen::Ref<const Eigen::VectorXd>& y, const HyperParams& init,
                const TuneConfig& config);

}  // namespace acgp
