#include "acgp/bounds.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace acgp {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Integer cutoff step clamped to [s, N]. `raw` may be huge or infinite when
// the correlation estimate is tiny.
Eigen::Index clamp_cutoff(double raw, Eigen::Index s, Eigen::Index n) {
  if (!std::isfinite(raw) || raw >= static_cast<double>(n)) return n;
  const double floored = std::floor(raw);
  if (floored <= static_cast<double>(s)) return s;
  return static_cast<Eigen::Index>(floored);
}

}  // namespace

void BlockSnapshot::validate() const {
  const Eigen::Index m = variances.size();
  if (n_total < 0 || processed < 0 || processed > n_total) {
    throw std::invalid_argument("BlockSnapshot: invalid index bounds");
  }
  if (end() > n_total) {
    throw std::invalid_argument("BlockSnapshot: block extends past the dataset");
  }
  if (residuals.size() != m || noise.size() != m || covariances.size() != std::max<Eigen::Index>(m - 1, 0)) {
    throw std::invalid_argument("BlockSnapshot: inconsistent field sizes");
  }
  if (!(noise_floor > 0.0)) {
    throw std::invalid_argument("BlockSnapshot: noise floor must be positive");
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(variances[j] > 0.0)) {
      throw std::invalid_argument("BlockSnapshot: nonpositive block variance");
    }
    if (!(noise[j] > 0.0)) {
      throw std::invalid_argument("BlockSnapshot: nonpositive noise variance");
    }
  }
#ifndef NDEBUG
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    assert(covariances[j] * covariances[j] <=
           variances[j] * variances[j + 1] * (1.0 + 1e-8) + 1e-12);
  }
#endif
}

BoundsReport evaluate_bounds(const BlockSnapshot& snapshot, const BoundsOptions& options) {
  snapshot.validate();

  BoundsReport report;
  report.n_total = snapshot.n_total;
  report.processed = snapshot.processed;

  const Eigen::Index n = snapshot.n_total;
  const Eigen::Index s = snapshot.processed;
  const double d_processed = snapshot.logdet_processed;
  const double q_processed = snapshot.quad_processed;

  // Empty remainder: both bounds collapse to the exact processed values.
  if (s == n) {
    report.logdet_lower = d_processed;
    report.logdet_upper = d_processed;
    report.quad_lower = q_processed;
    report.quad_upper = q_processed;
    report.psi_d = static_cast<double>(n);
    report.psi_q = static_cast<double>(n);
    return report;
  }

  const Eigen::Index m = snapshot.block_size();
  if (m < 2) {
    throw std::invalid_argument("evaluate_bounds: needs at least two block points");
  }

  const auto& v = snapshot.variances;
  const auto& c = snapshot.covariances;
  const auto& e = snapshot.residuals;
  const auto& noise = snapshot.noise;
  const double log_floor = std::log(snapshot.noise_floor);
  const double remaining = static_cast<double>(n - s);

  // --- Log-determinant ---------------------------------------------------
  const double mu_d = v.array().log().mean();
  double rho_d = 0.0;
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    rho_d += c[j] * c[j] / (noise[j] * noise[j + 1]);
  }
  rho_d /= static_cast<double>(m - 1);

  // Step count until the modeled per-step decay rho_d would drag the mean
  // log variance below the noise floor; beyond it the deterministic floor
  // is the better lower bound.
  Eigen::Index psi_d = n;
  if (rho_d > 0.0) {
    const double raw = static_cast<double>(s) - 1.0 + (2.0 / rho_d) * (mu_d - log_floor);
    psi_d = clamp_cutoff(raw, s, n);
  }
  const double steps_d = static_cast<double>(psi_d - s);

  report.mu_d = mu_d;
  report.rho_d = rho_d;
  report.psi_d = static_cast<double>(psi_d);
  report.logdet_upper = d_processed + remaining * mu_d;
  report.logdet_lower = d_processed + steps_d * (mu_d - 0.5 * (steps_d - 1.0) * rho_d) +
                        static_cast<double>(n - psi_d) * log_floor;

  // --- Quadratic term ----------------------------------------------------
  const double mu_q = (e.array().square() / v.array()).mean();
  const double tail_mean = (e.array().square() / noise.array()).mean();
  double rho_q_corr = 0.0;
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    rho_q_corr += e[j] * e[j] * c[j] * c[j] / (v[j] * noise[j] * noise[j + 1]);
  }
  rho_q_corr /= static_cast<double>(m - 1);

  report.mu_q = mu_q;
  report.rho_q_corr = rho_q_corr;
  report.tail_mean = tail_mean;

  if (options.uq_mode == UpperQuadMode::MainText) {
    report.psi_q = static_cast<double>(n);
    report.quad_upper =
        q_processed + remaining * (mu_q + 0.5 * (remaining - 1.0) * rho_q_corr);
  } else {
    // Extend the correlation-corrected estimate while its marginal step
    // stays below the conservative per-point cap, then switch to the cap.
    Eigen::Index psi_q = n;
    if (rho_q_corr > 0.0) {
      const double raw =
          static_cast<double>(s) + 1.0 + (tail_mean - mu_q) / rho_q_corr;
      psi_q = clamp_cutoff(raw, s, n);
    }
    const double steps_q = static_cast<double>(psi_q - s);
    report.psi_q = static_cast<double>(psi_q);
    report.quad_upper = q_processed +
                        steps_q * (mu_q + 0.5 * (steps_q - 1.0) * rho_q_corr) +
                        static_cast<double>(n - psi_q) * tail_mean;
  }

  const double mean_sq_err = e.array().square().mean();
  const double mu_q_weighted = (e.array().square() * v.array()).mean();
  double rho_q_signed = 0.0;
  for (Eigen::Index j = 0; j + 1 < m; ++j) {
    rho_q_signed += e[j] * e[j + 1] * c[j];
  }
  rho_q_signed /= static_cast<double>(m - 1);

  const double denom = mu_q_weighted + (remaining - 1.0) * rho_q_signed;
  const double alpha_candidate = denom > 0.0 ? mean_sq_err / denom : 0.0;

  double alpha = alpha_candidate;
  if (options.alpha_mode == AlphaMode::PreviousBlock) {
    alpha = options.previous_alpha.value_or(0.0);
  }

  report.mean_sq_err = mean_sq_err;
  report.mu_q_weighted = mu_q_weighted;
  report.rho_q_signed = rho_q_signed;
  report.alpha = alpha;
  report.alpha_candidate = alpha_candidate;
  report.quad_lower =
      q_processed +
      alpha * remaining * (2.0 * mean_sq_err - alpha * (mu_q_weighted + rho_q_signed * (remaining - 1.0)));

  return report;
}

std::pair<double, double> lml_scale(double logdet_lower, double logdet_upper,
                                    double quad_lower, double quad_upper,
                                    Eigen::Index n_total) {
  const double constant = 0.5 * static_cast<double>(n_total) * kLog2Pi;
  const double lower = -0.5 * logdet_upper - 0.5 * quad_upper - constant;
  const double upper = -0.5 * logdet_lower - 0.5 * quad_lower - constant;
  return {lower, upper};
}

std::pair<double, double> lml_scale(const BoundsReport& report) {
  return lml_scale(report.logdet_lower, report.logdet_upper, report.quad_lower,
                   report.quad_upper, report.n_total);
}

bool check_stop(double lml_lower, double lml_upper, double rtol) {
  if (!(rtol >= 0.0)) throw std::invalid_argument("check_stop: rtol must be nonnegative");
  if (!std::isfinite(lml_lower) || !std::isfinite(lml_upper)) return false;
  if (lml_upper < lml_lower) return false;  // inverted bounds: keep going
  const double sl = sign_of(lml_lower);
  const double su = sign_of(lml_upper);
  if (sl == 0.0 || sl != su) return false;
  const double scale = 2.0 * std::min(std::abs(lml_lower), std::abs(lml_upper));
  return (lml_upper - lml_lower) / scale < rtol;
}

bool check_stop(const BoundsReport& report, double rtol) {
  const auto [lower, upper] = lml_scale(report);
  return check_stop(lower, upper, rtol);
}

double midpoint_estimator(double lower, double upper) { return 0.5 * (lower + upper); }

double extrapolation_estimator(double lml_processed, Eigen::Index processed,
                               Eigen::Index n_total) {
  if (processed < 1) throw std::invalid_argument("extrapolation_estimator: needs processed >= 1");
  return static_cast<double>(n_total) / static_cast<double>(processed) * lml_processed;
}

}  // namespace acgp
