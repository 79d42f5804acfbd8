#include "acgp/hyperopt.hpp"

#include <chrono>
#include <cmath>

#include "acgp/exact_gp.hpp"

namespace acgp {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

KernelSpec HyperParams::kernel(KernelFamily family) const {
  return KernelSpec{family, std::exp(log_lengthscale), std::exp(log_amplitude)};
}

NoiseModel HyperParams::noise() const {
  return NoiseModel::homoskedastic(std::exp(log_noise));
}

Eigen::Vector3d HyperParams::as_vector() const {
  return Eigen::Vector3d(log_lengthscale, log_amplitude, log_noise);
}

HyperParams HyperParams::from_vector(const Eigen::Vector3d& v) {
  return HyperParams{v[0], v[1], v[2]};
}

ObjectiveValue objective(const HyperParams& params, KernelFamily family,
                         const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXd>& y, double rtol,
                         const TuneConfig& config) {
  const Eigen::Vector3d v = params.as_vector();
  if (!v.allFinite()) {
    throw std::invalid_argument("objective: hyperparameters must be finite");
  }
  const Eigen::Index n = X.rows();
  const Eigen::Index cap = config.max_points < 0 ? n : std::min(config.max_points, n);
  try {
    if (cap < 2) {
      // Too small for a blocked run; evaluate the prefix exactly.
      ExactModel model(params.kernel(family), MeanModel::zero(), params.noise(),
                       X.topRows(cap), y.head(cap));
      return ObjectiveValue{-extrapolation_estimator(model.lml(), cap, n), cap};
    }
    StopConfig run_config;
    run_config.rtol = rtol;
    Eigen::Index block = std::min(config.block_size, cap);
    if (block % 2 != 0) block -= 1;
    run_config.block_size = block;
    run_config.max_points = cap;
    run_config.estimator_mode = EstimatorMode::Extrapolation;
    const AcgpResult result =
        acgp_run(params.kernel(family), MeanModel::zero(), params.noise(), X, y, run_config);
    return ObjectiveValue{-result.estimate, result.processed};
  } catch (const NotPositiveDefiniteError&) {
    return ObjectiveValue{std::numeric_limits<double>::infinity(), 0};
  }
}

TuneResult tune(KernelFamily family, const Eigen::Ref<const Eigen::MatrixXd>& X,
                const Eigen::Ref<const Eigen::VectorXd>& y, const HyperParams& init,
                const TuneConfig& config) {
  const auto start = Clock::now();
  TuneResult result;

  Eigen::Vector3d current = init.as_vector();
  double rtol = TuneConfig::tolerance(0);
  ObjectiveValue current_value = objective(init, family, X, y, rtol, config);

  result.trajectory.push_back(TuneStep{seconds_since(start), 0, init, current_value.value,
                                       current_value.points_used, std::nullopt});
  result.best = init;
  result.best_objective = current_value.value;

  const auto out_of_budget = [&] {
    return seconds_since(start) > config.wall_clock_budget_seconds;
  };

  double step_size = config.initial_step;
  for (int restart = 0; restart < config.max_restarts; ++restart) {
    const double tol = TuneConfig::tolerance(restart);
    rtol = tol;
    // Re-evaluate at the new precision so convergence is judged on one scale.
    current_value = objective(HyperParams::from_vector(current), family, X, y, rtol, config);
    step_size = config.initial_step;

    for (int step = 0; step < config.max_steps_per_restart; ++step) {
      if (out_of_budget()) {
        result.budget_exhausted = true;
        return result;
      }

      // Central finite differences in log space.
      Eigen::Vector3d gradient;
      for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d plus = current;
        Eigen::Vector3d minus = current;
        plus[k] += config.fd_step;
        minus[k] -= config.fd_step;
        const double f_plus =
            objective(HyperParams::from_vector(plus), family, X, y, rtol, config).value;
        const double f_minus =
            objective(HyperParams::from_vector(minus), family, X, y, rtol, config).value;
        gradient[k] = (f_plus - f_minus) / (2.0 * config.fd_step);
      }
      if (!gradient.allFinite() || gradient.norm() == 0.0) break;

      // Backtracking: halve the step until the objective does not increase.
      bool accepted = false;
      double trial_step = step_size;
      ObjectiveValue trial_value;
      Eigen::Vector3d trial;
      for (int bt = 0; bt < config.max_backtracks; ++bt) {
        trial = current - trial_step * gradient / std::max(gradient.norm(), 1.0);
        trial_value = objective(HyperParams::from_vector(trial), family, X, y, rtol, config);
        if (trial_value.value <= current_value.value) {
          accepted = true;
          break;
        }
        trial_step *= 0.5;
      }
      if (!accepted) break;  // no descent at this precision

      const double previous = current_value.value;
      current = trial;
      current_value = trial_value;
      step_size = std::min(trial_step * 2.0, config.initial_step);
      result.trajectory.push_back(TuneStep{seconds_since(start), restart,
                                           HyperParams::from_vector(current),
                                           current_value.value, current_value.points_used,
                                           std::nullopt});
      if (current_value.value < result.best_objective) {
        result.best_objective = current_value.value;
        result.best = HyperParams::from_vector(current);
      }

      const double denom = std::max(std::abs(previous), 1e-12);
      if (std::abs(previous - current_value.value) / denom < tol) break;
    }
  }
  return result;
}

}  // namespace acgp
