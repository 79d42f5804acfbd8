#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acgp/dataset.hpp"
#include "acgp/driver.hpp"
#include "acgp/hyperopt.hpp"

namespace acgp {

/// One output row of an experiment run. Every row is self-describing and the
/// files are append-only CSV with the fixed header from csv_header().
struct ExperimentRecord {
  std::string experiment;
  std::string kernel;
  double log_lengthscale = 0.0;
  std::uint64_t seed = 0;
  Eigen::Index s = 0;  // processed index (or point count / restart index)
  Eigen::Index t = 0;  // block end (or subset size M)
  double elapsed_seconds = 0.0;
  std::optional<double> logdet_lower, logdet_upper, quad_lower, quad_upper;
  std::optional<double> exact_logdet, exact_quad;
  std::optional<double> estimate;
  std::optional<double> exact_lml;
  std::optional<double> rmse;

  static const std::string& csv_header();
  std::string csv_row() const;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

void write_records_csv(const std::string& path, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(const std::string& path);

/// Bound-tightness sweep: for every (kernel, log lengthscale, seed) the
/// dataset is shuffled, truncated to max_points, and decomposed to the end
/// with stopping disabled, recording per-block bounds and elapsed time plus
/// the exact log-determinant and quadratic form from the completed
/// factorization. A terminal collapsed row (s == t == N) closes each run.
std::vector<ExperimentRecord> run_bound_sweep(const Dataset& data,
                                              const std::vector<KernelFamily>& kernels,
                                              const std::vector<double>& log_lengthscales,
                                              double sigma2, double theta,
                                              Eigen::Index block_size,
                                              const std::vector<std::uint64_t>& seeds,
                                              Eigen::Index max_points = -1);

/// Partial-LML curves, one row per prefix size per kernel setting.
std::vector<ExperimentRecord> run_lml_curve(const Dataset& data,
                                            const std::vector<KernelFamily>& kernels,
                                            const std::vector<double>& log_lengthscales,
                                            double sigma2, double theta,
                                            Eigen::Index block_size = 256);

/// Hyperparameter-tuning trajectory. Each accepted step is recorded with the
/// negated objective as `estimate`; the exact log-marginal likelihood of the
/// current hyperparameters is evaluated on a prefix of at most
/// exact_eval_cap points (full objectives at every step would be cubic in
/// N). The final row carries the test RMSE of the best parameters.
std::vector<ExperimentRecord> run_tune(const Dataset& train, const Dataset& test,
                                       KernelFamily family, const HyperParams& init,
                                       const TuneConfig& config,
                                       Eigen::Index exact_eval_cap = 2000);

/// Root-mean-square error of the subset-of-data prediction on a test split.
double prediction_rmse(const AcgpResult& result, const KernelSpec& kernel, const MeanModel& mean,
                       const NoiseModel& noise, const Dataset& train, const Dataset& test);

}  // namespace acgp
