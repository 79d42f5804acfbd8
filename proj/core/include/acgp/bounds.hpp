#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>

namespace acgp {

/// Read-only view of the decomposition state right after the symmetric
/// downdate of a block and before its factorization. With s points fully
/// processed and the block covering rows [s, t), the downdated block equals
/// the posterior covariance of the block points conditioned on the first s
/// points, plus noise. Everything the bound evaluation needs is collected
/// here:
///   variances[j]   = sigma^2(x_{s+j}) + post_cov(x_{s+j}, x_{s+j})
///   covariances[j] = post_cov(x_{s+j}, x_{s+j+1})
///   residuals[j]   = y_{s+j} - posterior_mean(x_{s+j})
///   noise[j]       = sigma^2(x_{s+j})
/// logdet_processed and quad_processed are the running log-determinant and
/// quadratic form of the processed prefix.
struct BlockSnapshot {
  Eigen::Index n_total = 0;  // N
  Eigen::Index processed = 0;  // s
  double logdet_processed = 0.0;  // D
  double quad_processed = 0.0;    // Q
  Eigen::VectorXd variances;    // V, size m
  Eigen::VectorXd covariances;  // C, size m-1
  Eigen::VectorXd residuals;    // e, size m
  Eigen::VectorXd noise;        // sigma^2 per block point, size m
  double noise_floor = 0.0;     // sigma^2_min

  Eigen::Index block_size() const { return variances.size(); }
  Eigen::Index end() const { return processed + variances.size(); }  // t

  /// Throws std::invalid_argument when sizes or positivity constraints are
  /// violated. The covariance inequality V_j V_{j+1} >= C_j^2 is only a
  /// debug-mode assertion; rounding can break it marginally.
  void validate() const;
};

/// Which block supplies the coefficient of the quadratic lower bound.
/// CurrentBlock maximizes the bound with statistics of the block under
/// evaluation; PreviousBlock keeps the coefficient measurable with respect
/// to the already-processed points, as the expectation guarantees require.
enum class AlphaMode { CurrentBlock, PreviousBlock };

/// Form of the quadratic upper bound. CutoffRemark caps the linearly growing
/// calibration estimate with the conservative per-point mean of e^2/noise
/// beyond the crossing step; MainText extrapolates the calibration estimate
/// over the whole remainder.
enum class UpperQuadMode { CutoffRemark, MainText };

struct BoundsOptions {
  AlphaMode alpha_mode = AlphaMode::CurrentBlock;
  UpperQuadMode uq_mode = UpperQuadMode::CutoffRemark;
  /// Coefficient to use when alpha_mode == PreviousBlock; typically the
  /// alpha_candidate of the previous block's report. Zero (the safe default)
  /// degrades the quadratic lower bound to the processed quadratic form.
  std::optional<double> previous_alpha;
};

/// Bounds on log|K| (logdet_*) and y^T K^{-1} y (quad_*) for the full
/// N-point model, together with the block statistics they were built from.
/// Lower <= upper is not guaranteed pointwise; the guarantees hold in
/// expectation over i.i.d. data, and the stopping test treats an inverted
/// pair as "do not stop".
struct BoundsReport {
  Eigen::Index n_total = 0;
  Eigen::Index processed = 0;

  double logdet_lower = 0.0;   // L_D
  double logdet_upper = 0.0;   // U_D
  double quad_lower = 0.0;     // L_Q
  double quad_upper = 0.0;     // U_Q

  // Log-determinant statistics.
  double mu_d = 0.0;    // mean log variance of the block
  double rho_d = 0.0;   // mean squared cross-correlation, noise-normalized
  double psi_d = 0.0;   // step at which the modeled decay reaches the noise floor

  // Quadratic statistics.
  double mu_q = 0.0;        // mean of e^2 / V (error calibration)
  double rho_q_corr = 0.0;  // calibration correlation correction
  double psi_q = 0.0;       // step at which the capped estimate takes over
  double tail_mean = 0.0;   // mean of e^2 / noise (conservative cap)
  double mean_sq_err = 0.0;      // mean of e^2
  double mu_q_weighted = 0.0;    // mean of e^2 * V
  double rho_q_signed = 0.0;     // mean of e_j e_{j+1} C_j
  double alpha = 0.0;            // coefficient used in L_Q
  double alpha_candidate = 0.0;  // coefficient this block would propose
};

/// Evaluate all four bounds from a snapshot. Requires block_size >= 2 unless
/// the snapshot is the empty remainder (s == N), in which case the bounds
/// collapse to the exact processed values.
BoundsReport evaluate_bounds(const BlockSnapshot& snapshot, const BoundsOptions& options = {});

/// Map bounds on (log|K|, y^T K^{-1} y) to bounds on the log-marginal
/// likelihood -0.5 log|K| - 0.5 y^T K^{-1} y - (N/2) log 2 pi. The negation
/// swaps the roles: the lower LML bound comes from the upper bounds on the
/// two terms. Returns (lower, upper).
std::pair<double, double> lml_scale(double logdet_lower, double logdet_upper,
                                    double quad_lower, double quad_upper,
                                    Eigen::Index n_total);

std::pair<double, double> lml_scale(const BoundsReport& report);

/// Relative-error stopping test on the combined LML-scale bounds: true iff
/// upper >= lower, both share a nonzero sign, and
/// (upper - lower) / (2 min(|upper|, |lower|)) < rtol.
bool check_stop(double lml_lower, double lml_upper, double rtol);
bool check_stop(const BoundsReport& report, double rtol);

/// (lower + upper) / 2; when the true value lies between the bounds and the
/// stopping test passed, its relative error is below rtol.
double midpoint_estimator(double lower, double upper);

/// Linear extrapolation of the processed log-marginal likelihood:
/// (N / processed) * lml_processed. Biased, but cheap to differentiate;
/// exact when processed == N.
double extrapolation_estimator(double lml_processed, Eigen::Index processed,
                               Eigen::Index n_total);

}  // namespace acgp
