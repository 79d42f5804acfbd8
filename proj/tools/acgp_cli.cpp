// Command line harness for dataset generation, fitting, bound sweeps,
// LML curves, and hyperparameter tuning. All results are CSV files.
#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "acgp/exact_gp.hpp"
#include "acgp/experiment.hpp"

namespace {

using namespace acgp;

struct DatasetOptions {
  std::string csv_path;
  std::string target_column = "y";
  double split = 2.0 / 3.0;
  std::string synthetic_kind;
  Eigen::Index synthetic_n = 1000;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--csv", csv_path, "input CSV file");
    cmd->add_option("--target-col", target_column, "target column name or index");
    cmd->add_option("--split", split, "training fraction of the CSV");
    cmd->add_option("--synthetic", synthetic_kind, "synthetic kind (fig1, visualization)");
    cmd->add_option("--n", synthetic_n, "synthetic dataset size");
    if (with_seed) cmd->add_option("--seed", seed, "shuffle / generation seed");
  }

  // Returns (train, test); synthetic datasets have an empty test split.
  std::pair<Dataset, Dataset> load() const {
    if (!csv_path.empty() && !synthetic_kind.empty()) {
      throw CLI::ValidationError("--csv and --synthetic are mutually exclusive");
    }
    if (!csv_path.empty()) return load_csv(csv_path, target_column, split, seed);
    if (!synthetic_kind.empty()) {
      Dataset all = gen_synthetic(synthetic_kind, synthetic_n, seed);
      Dataset empty;
      empty.X.resize(0, all.X.cols());
      empty.y.resize(0);
      return {std::move(all), std::move(empty)};
    }
    throw CLI::ValidationError("one of --csv or --synthetic is required");
  }
};

std::vector<KernelFamily> parse_kernels(const std::string& list) {
  std::vector<KernelFamily> kernels;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) kernels.push_back(kernel_family_from_string(item));
  if (kernels.empty()) throw CLI::ValidationError("--kernel: empty kernel list");
  return kernels;
}

std::vector<double> parse_doubles(const std::string& list) {
  std::vector<double> values;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(std::stod(item));
  return values;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list) {
  std::vector<std::uint64_t> values;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(std::stoull(item));
  return values;
}

void enforce_buffer_cap(Eigen::Index max_n, double cap_mb) {
  const double required_mb =
      static_cast<double>(max_n) * static_cast<double>(max_n) * 8.0 / (1024.0 * 1024.0);
  if (required_mb > cap_mb) {
    throw CLI::ValidationError("requested buffer of " + std::to_string(required_mb) +
                               " MiB exceeds --max-buffer-mb=" + std::to_string(cap_mb) +
                               "; lower --max-n or raise the cap");
  }
}

int run_gen_data(const std::string& kind, Eigen::Index n, std::uint64_t seed,
                 const std::string& out) {
  const Dataset data = gen_synthetic(kind, n, seed);
  std::ofstream stream(out);
  if (!stream) throw std::runtime_error("cannot open " + out);
  for (Eigen::Index c = 0; c < data.X.cols(); ++c) stream << 'x' << (c + 1) << ',';
  stream << "y\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index c = 0; c < data.X.cols(); ++c) stream << format_double(data.X(i, c)) << ',';
    stream << format_double(data.y[i]) << '\n';
  }
  std::cout << "wrote " << data.size() << " rows to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process regression via adaptively stopped Cholesky decomposition"};
  app.require_subcommand(1);

  // ---- gen-data ----
  auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset to CSV");
  std::string gen_kind = "visualization";
  Eigen::Index gen_n = 5000;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "dataset.csv";
  gen->add_option("--kind", gen_kind, "fig1 or visualization")->required();
  gen->add_option("--n", gen_n, "number of rows");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--out", gen_out, "output CSV path")->required();

  // ---- common experiment options ----
  std::string kernel_list = "se";
  std::string log_ell_list = "0";
  double sigma2 = 1e-3;
  double theta = 1.0;
  Eigen::Index block_size = 256;
  double rtol = 0.1;
  Eigen::Index max_n = -1;
  double max_buffer_mb = 8192.0;
  std::string out_path = "results.csv";
  std::string estimator = "midpoint";

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "single adaptive decomposition with a per-block trace");
  DatasetOptions fit_data;
  fit_data.attach(fit);
  fit->add_option("--kernel", kernel_list, "kernel family");
  fit->add_option("--log-lengthscale", log_ell_list, "log lengthscale");
  fit->add_option("--sigma2", sigma2, "noise variance");
  fit->add_option("--theta", theta, "kernel amplitude");
  fit->add_option("--block-size", block_size, "rows per block (even)");
  fit->add_option("--rtol", rtol, "relative-error stopping target (0 disables)");
  fit->add_option("--max-n", max_n, "cap on processed points");
  fit->add_option("--max-buffer-mb", max_buffer_mb, "refuse buffers above this size");
  fit->add_option("--estimator", estimator, "midpoint or extrapolation")
      ->check(CLI::IsMember({"midpoint", "extrapolation"}));
  fit->add_option("--out", out_path, "output records CSV");

  // ---- bound-sweep ----
  auto* sweep = app.add_subcommand("bound-sweep", "per-block bound tightness over a kernel grid");
  DatasetOptions sweep_data;
  sweep_data.attach(sweep, /*with_seed=*/false);
  std::string sweep_kernels = "se,ou";
  std::string sweep_ells = "-1,0,1,2,3";
  std::string sweep_seeds = "0";
  sweep->add_option("--kernel", sweep_kernels, "comma-separated kernel families");
  sweep->add_option("--log-lengthscale", sweep_ells, "comma-separated log lengthscales");
  sweep->add_option("--sigma2", sigma2, "noise variance");
  sweep->add_option("--theta", theta, "kernel amplitude");
  sweep->add_option("--block-size", block_size, "rows per block (even)");
  sweep->add_option("--max-n", max_n, "cap on processed points");
  sweep->add_option("--max-buffer-mb", max_buffer_mb, "refuse buffers above this size");
  sweep->add_option("--seed", sweep_seeds, "comma-separated shuffle seeds, one run each");
  sweep->add_option("--out", out_path, "output records CSV");

  // ---- lml-curve ----
  auto* curve = app.add_subcommand("lml-curve", "partial log-marginal likelihood per prefix size");
  DatasetOptions curve_data;
  curve_data.attach(curve);
  std::string curve_kernels = "se";
  std::string curve_ells = "0";
  curve->add_option("--kernel", curve_kernels, "comma-separated kernel families");
  curve->add_option("--log-lengthscale", curve_ells, "comma-separated log lengthscales");
  curve->add_option("--sigma2", sigma2, "noise variance");
  curve->add_option("--theta", theta, "kernel amplitude");
  curve->add_option("--block-size", block_size, "rows per block");
  curve->add_option("--max-buffer-mb", max_buffer_mb, "refuse buffers above this size");
  curve->add_option("--out", out_path, "output records CSV");

  // ---- validate ----
  auto* validate = app.add_subcommand("validate", "parse a records CSV and check its schema");
  std::string validate_path;
  validate->add_option("--records", validate_path, "records CSV to check")->required();

  // ---- tune ----
  auto* tune_cmd = app.add_subcommand("tune", "hyperparameter tuning with tightening tolerances");
  DatasetOptions tune_data;
  tune_data.attach(tune_cmd);
  int max_restarts = 5;
  int max_steps = 40;
  double init_log_ell = 0.0, init_log_theta = 0.0, init_log_sigma2 = std::log(0.1);
  Eigen::Index exact_cap = 2000;
  double budget_seconds = std::numeric_limits<double>::infinity();
  tune_cmd->add_option("--kernel", kernel_list, "kernel family");
  tune_cmd->add_option("--block-size", block_size, "rows per block (even)");
  tune_cmd->add_option("--max-n", max_n, "cap on processed points");
  tune_cmd->add_option("--max-buffer-mb", max_buffer_mb, "refuse buffers above this size");
  tune_cmd->add_option("--max-restarts", max_restarts, "tolerance-tightening restarts");
  tune_cmd->add_option("--max-steps", max_steps, "steps per restart");
  tune_cmd->add_option("--init-log-lengthscale", init_log_ell, "initial log lengthscale");
  tune_cmd->add_option("--init-log-theta", init_log_theta, "initial log amplitude");
  tune_cmd->add_option("--init-log-sigma2", init_log_sigma2, "initial log noise variance");
  tune_cmd->add_option("--exact-eval-cap", exact_cap, "prefix size for exact-LML logging");
  tune_cmd->add_option("--budget-seconds", budget_seconds, "wall-clock budget");
  tune_cmd->add_option("--out", out_path, "output records CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen_data(gen_kind, gen_n, gen_seed, gen_out);

    if (validate->parsed()) {
      const auto records = read_records_csv(validate_path);
      std::cout << validate_path << ": " << records.size() << " valid rows\n";
      return 0;
    }

    if (fit->parsed()) {
      const auto [train, test] = fit_data.load();
      const Eigen::Index cap = max_n < 0 ? train.size() : std::min(max_n, train.size());
      enforce_buffer_cap(cap, max_buffer_mb);

      const KernelFamily family = parse_kernels(kernel_list).front();
      const double log_ell = parse_doubles(log_ell_list).front();
      const KernelSpec kernel{family, std::exp(log_ell), theta};
      const NoiseModel noise = NoiseModel::homoskedastic(sigma2);

      StopConfig config;
      config.rtol = rtol;
      config.block_size = std::min(block_size, cap);
      config.max_points = max_n;
      config.estimator_mode =
          estimator == "midpoint" ? EstimatorMode::Midpoint : EstimatorMode::Extrapolation;
      const AcgpResult result =
          acgp_run(kernel, MeanModel::zero(), noise, train.X, train.y, config);

      std::vector<ExperimentRecord> records;
      ExperimentRecord base;
      base.experiment = "fit";
      base.kernel = to_string(family);
      base.log_lengthscale = log_ell;
      base.seed = train.shuffle_seed;
      for (const auto& entry : result.trace) {
        ExperimentRecord record = base;
        record.s = entry.report.processed;
        record.t = entry.block_end;
        record.elapsed_seconds = entry.elapsed_seconds;
        record.logdet_lower = entry.report.logdet_lower;
        record.logdet_upper = entry.report.logdet_upper;
        record.quad_lower = entry.report.quad_lower;
        record.quad_upper = entry.report.quad_upper;
        records.push_back(std::move(record));
      }
      ExperimentRecord final_row = base;
      final_row.s = result.processed;
      final_row.t = result.processed;
      final_row.estimate = result.estimate;
      if (test.size() > 0) {
        final_row.rmse =
            prediction_rmse(result, kernel, MeanModel::zero(), noise, train, test);
      }
      records.push_back(final_row);
      write_records_csv(out_path, records);

      std::cout << (result.stopped ? "stopped early" : "ran to the cap") << " after "
                << result.processed << " of " << train.size() << " points\n"
                << "estimate " << format_double(result.estimate) << "  bounds ["
                << format_double(result.bounds_at_stop.first) << ", "
                << format_double(result.bounds_at_stop.second) << "]\n";
      if (final_row.rmse) std::cout << "test RMSE " << format_double(*final_row.rmse) << "\n";
      std::cout << "wrote " << records.size() << " rows to " << out_path << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      const auto seeds = parse_seeds(sweep_seeds);
      sweep_data.seed = seeds.front();
      const auto [train, test] = sweep_data.load();
      const Eigen::Index cap = max_n < 0 ? train.size() : std::min(max_n, train.size());
      enforce_buffer_cap(cap, max_buffer_mb);
      const auto records = run_bound_sweep(train, parse_kernels(sweep_kernels),
                                           parse_doubles(sweep_ells), sigma2, theta,
                                           block_size, seeds, max_n);
      write_records_csv(out_path, records);
      std::cout << "wrote " << records.size() << " rows to " << out_path << "\n";
      return 0;
    }

    if (curve->parsed()) {
      const auto [train, test] = curve_data.load();
      enforce_buffer_cap(train.size(), max_buffer_mb);
      const auto records = run_lml_curve(train, parse_kernels(curve_kernels),
                                         parse_doubles(curve_ells), sigma2, theta, block_size);
      write_records_csv(out_path, records);
      std::cout << "wrote " << records.size() << " rows to " << out_path << "\n";
      return 0;
    }

    if (tune_cmd->parsed()) {
      const auto [train, test] = tune_data.load();
      const Eigen::Index cap = max_n < 0 ? train.size() : std::min(max_n, train.size());
      enforce_buffer_cap(cap, max_buffer_mb);

      TuneConfig config;
      config.max_restarts = max_restarts;
      config.max_steps_per_restart = max_steps;
      config.block_size = block_size;
      config.max_points = max_n;
      config.wall_clock_budget_seconds = budget_seconds;
      const auto records =
          run_tune(train, test, parse_kernels(kernel_list).front(),
                   HyperParams{init_log_ell, init_log_theta, init_log_sigma2}, config, exact_cap);
      write_records_csv(out_path, records);
      std::cout << "wrote " << records.size() << " rows to " << out_path << "\n";
      return 0;
    }
  } catch (const CLI::Error& error) {
    return app.exit(error);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
