#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>

namespace acgp {

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::string name;
  std::uint64_t shuffle_seed = 0;
  bool standardized = false;

  Eigen::Index size() const { return X.rows(); }
};

/// Load a numeric CSV, shuffle it with the seed, split it into train/test by
/// split_fraction, and standardize inputs and targets to mean 0, variance 1
/// (population convention) with the statistics of the training split.
///
/// The first line is treated as a header when it does not parse as numbers.
/// `target_column` is a column name (requires a header) or a 0-based index.
/// Missing values or non-numeric fields are rejected with the offending row.
std::pair<Dataset, Dataset> load_csv(const std::string& path, const std::string& target_column,
                                     double split_fraction, std::uint64_t seed);

/// Reproducible synthetic datasets.
///
/// "fig1": 1-D inputs x ~ Normal(0, 100); targets
///     y = 2 sin(2 pi x / 5) + 0.479 x - 2.5 + eps, eps ~ Normal(0, 0.1),
///   giving targets of mean -2.5 and variance about 25.
/// "visualization": 1-D inputs x = 5 * Normal(0, 1); targets
///     y = 2 sin(2 pi x / 5) + 0.5 x + eps, eps ~ Normal(0, 2.25).
/// The periodic-plus-trend form and its constants are this library's choice
/// and are fixed here so experiments are comparable across runs.
Dataset gen_synthetic(const std::string& kind, Eigen::Index n, std::uint64_t seed);

/// Noiseless target function underlying a synthetic kind at a scalar input.
double synthetic_truth(const std::string& kind, double x);

/// Standardize columns of X and y to mean 0 / variance 1 using statistics of
/// the data itself (population variance). Constant columns are left centered
/// but unscaled. Returns the per-column (mean, scale) used.
struct Standardization {
  Eigen::VectorXd x_mean, x_scale;
  double y_mean = 0.0, y_scale = 1.0;

  void apply(Dataset& data) const;
};
Standardization standardize_in_place(Dataset& train);

}  // namespace acgp
