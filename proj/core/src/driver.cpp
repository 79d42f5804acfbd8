#include "acgp/driver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace acgp {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double lml_of(double logdet, double quad, Eigen::Index n) {
  return -0.5 * logdet - 0.5 * quad - 0.5 * static_cast<double>(n) * kLog2Pi;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void StopConfig::validate(Eigen::Index n_total) const {
  if (!(rtol >= 0.0)) throw std::invalid_argument("StopConfig: rtol must be >= 0");
  if (block_size < 2 || block_size % 2 != 0) {
    throw std::invalid_argument("StopConfig: block_size must be even and >= 2");
  }
  const Eigen::Index cap = max_points < 0 ? n_total : max_points;
  if (cap < 1 || cap > n_total) {
    throw std::invalid_argument("StopConfig: max_points out of range");
  }
  if (block_size > cap) {
    throw std::invalid_argument("StopConfig: block_size exceeds max_points");
  }
}

DataKernelSource::DataKernelSource(KernelSpec kernel, MeanModel mean, NoiseModel noise,
                                   const Eigen::Ref<const Eigen::MatrixXd>& X)
    : kernel_(kernel), mean_(mean), noise_(std::move(noise)), x_(X) {
  kernel_.validate();
}

Eigen::MatrixXd DataKernelSource::cov_block(Eigen::Index r0, Eigen::Index r1,
                                            Eigen::Index c0, Eigen::Index c1) const {
  return kernel_block(kernel_, x_.middleRows(r0, r1 - r0), x_.middleRows(c0, c1 - c0));
}

Eigen::VectorXd DataKernelSource::noise_diag(Eigen::Index b0, Eigen::Index b1) const {
  return noise_.diagonal(x_.middleRows(b0, b1 - b0));
}

Eigen::VectorXd DataKernelSource::mean_values(Eigen::Index b0, Eigen::Index b1) const {
  return mean_.values(b1 - b0);
}

double AcgpResult::lml_processed() const {
  return lml_of(logdet_processed, quad_processed, processed);
}

AcgpResult acgp_run(const KernelSource& source, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const StopConfig& config) {
  const Eigen::Index n = source.size();
  if (y.size() != n) throw std::invalid_argument("acgp_run: y size does not match the source");
  config.validate(n);
  const Eigen::Index max_n = config.max_points < 0 ? n : std::min(config.max_points, n);
  const Eigen::Index m = config.block_size;

  const auto start = Clock::now();
  AcgpResult result{.factor = FactorBuffer(max_n)};
  Eigen::MatrixXd& a = result.factor.matrix();
  Eigen::VectorXd& alpha = result.factor.alpha();

  double logdet = 0.0;
  double quad = 0.0;
  std::optional<double> previous_alpha;

  // First block: factor immediately, no stopping check.
  const Eigen::Index first = std::min(m, max_n);
  auto first_block = a.topLeftCorner(first, first);
  auto first_alpha = alpha.head(first);
  first_block = source.cov_block(0, first, 0, first);
  first_block.diagonal() += source.noise_diag(0, first);
  first_alpha = y.head(first) - source.mean_values(0, first);
  chol_in_place(first_block, config.jitter);
  forward_solve_in_place(first_block, first_alpha);
  logdet += logdet_from_chol(first_block);
  quad += first_alpha.squaredNorm();
  result.factor.set_processed(first);

  while (result.factor.processed() < max_n) {
    const Eigen::Index s = result.factor.processed();
    const Eigen::Index t = std::min(s + m, max_n);
    const Eigen::Index mb = t - s;

    auto cross = a.block(s, 0, mb, s);
    cross = source.cov_block(s, t, 0, s);
    solve_right_transposed(cross, a.topLeftCorner(s, s));

    auto block = a.block(s, s, mb, mb);
    auto block_alpha = alpha.segment(s, mb);
    block = source.cov_block(s, t, s, t);
    const Eigen::VectorXd block_noise = source.noise_diag(s, t);
    block.diagonal() += block_noise;
    block_alpha = y.segment(s, mb) - source.mean_values(s, t);

    symmetric_downdate(block, cross);
    block_alpha.noalias() -= cross * alpha.head(s);
    result.factor.set_downdated(t);

    if (mb >= 2) {
      BlockSnapshot snap;
      snap.n_total = n;
      snap.processed = s;
      snap.logdet_processed = logdet;
      snap.quad_processed = quad;
      snap.variances = block.diagonal();
      snap.covariances.resize(mb - 1);
      for (Eigen::Index j = 0; j + 1 < mb; ++j) snap.covariances[j] = block(j + 1, j);
      snap.residuals = block_alpha;
      snap.noise = block_noise;
      snap.noise_floor = source.noise_floor();

      BoundsOptions opts{.alpha_mode = config.alpha_mode,
                         .uq_mode = config.uq_mode,
                         .previous_alpha = previous_alpha};
      BoundsReport report = evaluate_bounds(snap, opts);
      previous_alpha = report.alpha_candidate;
      const bool stop = check_stop(report, config.rtol);
      result.trace.push_back(BlockTrace{.block_end = t,
                                        .report = report,
                                        .snapshot = std::move(snap),
                                        .elapsed_seconds = seconds_since(start)});
      if (stop) {
        result.stopped = true;
        result.bounds_at_stop = lml_scale(report);
        break;
      }
    }

    chol_in_place(block, config.jitter);
    forward_solve_in_place(block, block_alpha);
    logdet += logdet_from_chol(block);
    quad += block_alpha.squaredNorm();
    result.factor.set_processed(t);
  }

  result.processed = result.factor.processed();
  result.logdet_processed = logdet;
  result.quad_processed = quad;

  if (result.stopped) {
    result.estimate = config.estimator_mode == EstimatorMode::Midpoint
                          ? midpoint_estimator(result.bounds_at_stop.first,
                                               result.bounds_at_stop.second)
                          : extrapolation_estimator(result.lml_processed(),
                                                    result.processed, n);
    return result;
  }

  if (result.processed == n) {
    result.estimate = result.lml_processed();
  } else if (config.estimator_mode == EstimatorMode::Extrapolation || result.trace.empty()) {
    result.estimate = extrapolation_estimator(result.lml_processed(), result.processed, n);
  } else {
    result.estimate = midpoint_estimator(lml_scale(result.trace.back().report).first,
                                         lml_scale(result.trace.back().report).second);
  }
  result.bounds_at_stop = result.trace.empty()
                              ? std::make_pair(result.estimate, result.estimate)
                              : lml_scale(result.trace.back().report);
  return result;
}

AcgpResult acgp_run(const KernelSpec& kernel, const MeanModel& mean, const NoiseModel& noise,
                    const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& y, const StopConfig& config) {
  DataKernelSource source(kernel, mean, noise, X);
  return acgp_run(source, y, config);
}

Prediction predict(const AcgpResult& result, const KernelSpec& kernel, const MeanModel& mean,
                   const NoiseModel& noise, const Eigen::Ref<const Eigen::MatrixXd>& X_train_prefix,
                   const Eigen::Ref<const Eigen::MatrixXd>& X_star) {
  const Eigen::Index m_used = result.processed;
  if (X_train_prefix.rows() < m_used) {
    throw std::invalid_argument("predict: training prefix shorter than the processed count");
  }
  Prediction out;
  out.mean = mean.values(X_star.rows());
  out.variance =
      Eigen::VectorXd::Constant(X_star.rows(), kernel.amplitude) + noise.diagonal(X_star);
  if (m_used == 0) return out;

  Eigen::MatrixXd cross = kernel_block(kernel, X_train_prefix.topRows(m_used), X_star);
  result.factor.chol_view().triangularView<Eigen::Lower>().solveInPlace(cross);
  out.mean.noalias() += cross.transpose() * result.factor.alpha_view();
  out.variance -= cross.colwise().squaredNorm().transpose();
  return out;
}

Eigen::VectorXd lml_curve(const KernelSpec& kernel, const MeanModel& mean, const NoiseModel& noise,
                          const Eigen::Ref<const Eigen::MatrixXd>& X,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          Eigen::Index block_size) {
  const Eigen::Index n = X.rows();
  if (n < 1) throw std::invalid_argument("lml_curve: empty dataset");
  if (y.size() != n) throw std::invalid_argument("lml_curve: X and y row counts differ");
  if (block_size < 1) throw std::invalid_argument("lml_curve: block_size must be >= 1");

  DataKernelSource source(kernel, mean, noise, X);
  FactorBuffer buffer(n);
  Eigen::MatrixXd& a = buffer.matrix();
  Eigen::VectorXd& alpha = buffer.alpha();
  Eigen::VectorXd curve(n);

  double logdet = 0.0;
  double quad = 0.0;
  Eigen::Index processed = 0;
  while (processed < n) {
    const Eigen::Index s = processed;
    const Eigen::Index t = std::min(s + block_size, n);
    const Eigen::Index mb = t - s;
    auto block = a.block(s, s, mb, mb);
    auto block_alpha = alpha.segment(s, mb);
    if (s > 0) {
      auto cross = a.block(s, 0, mb, s);
      cross = source.cov_block(s, t, 0, s);
      solve_right_transposed(cross, a.topLeftCorner(s, s));
      block = source.cov_block(s, t, s, t);
      block.diagonal() += source.noise_diag(s, t);
      block_alpha = y.segment(s, mb) - source.mean_values(s, t);
      symmetric_downdate(block, cross);
      block_alpha.noalias() -= cross * alpha.head(s);
    } else {
      block = source.cov_block(0, mb, 0, mb);
      block.diagonal() += source.noise_diag(0, mb);
      block_alpha = y.head(mb) - source.mean_values(0, mb);
    }
    chol_in_place(block);
    forward_solve_in_place(block, block_alpha);
    for (Eigen::Index i = s; i < t; ++i) {
      logdet += 2.0 * std::log(a(i, i));
      quad += alpha[i] * alpha[i];
      curve[i] = lml_of(logdet, quad, i + 1);
    }
    processed = t;
  }
  return curve;
}

}  // namespace acgp
