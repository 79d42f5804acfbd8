#include "acgp/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "acgp/exact_gp.hpp"
#include "acgp/random.hpp"

namespace acgp {
namespace {

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  double out = 0.0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), out);
  if (result.ec != std::errc() || result.ptr != field.data() + field.size()) {
    throw std::runtime_error("record field does not parse as a number: " + field);
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

const std::string& ExperimentRecord::csv_header() {
  static const std::string header =
      "experiment,kernel,log_lengthscale,seed,s,t,elapsed_seconds,"
      "logdet_lower,logdet_upper,quad_lower,quad_upper,exact_logdet,exact_quad,"
      "estimate,exact_lml,rmse";
  return header;
}

std::string ExperimentRecord::csv_row() const {
  std::ostringstream row;
  row << experiment << ',' << kernel << ',' << format_double(log_lengthscale) << ',' << seed
      << ',' << s << ',' << t << ',' << format_double(elapsed_seconds) << ','
      << format_optional(logdet_lower) << ',' << format_optional(logdet_upper) << ','
      << format_optional(quad_lower) << ',' << format_optional(quad_upper) << ','
      << format_optional(exact_logdet) << ',' << format_optional(exact_quad) << ','
      << format_optional(estimate) << ',' << format_optional(exact_lml) << ','
      << format_optional(rmse);
  return row.str();
}

void write_records_csv(const std::string& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream stream(path);
  if (!stream) throw std::runtime_error("cannot open for writing: " + path);
  stream << ExperimentRecord::csv_header() << '\n';
  for (const auto& record : records) stream << record.csv_row() << '\n';
  if (!stream) throw std::runtime_error("write failed: " + path);
}

std::vector<ExperimentRecord> read_records_csv(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(stream, line) || line != ExperimentRecord::csv_header()) {
    throw std::runtime_error("unexpected record header in " + path);
  }
  std::vector<ExperimentRecord> records;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::stringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(field);
    while (fields.size() < 16) fields.push_back("");
    if (fields.size() != 16) throw std::runtime_error("malformed record row in " + path);

    ExperimentRecord record;
    record.experiment = fields[0];
    record.kernel = fields[1];
    record.log_lengthscale = parse_optional(fields[2]).value();
    record.seed = std::stoull(fields[3]);
    record.s = std::stoll(fields[4]);
    record.t = std::stoll(fields[5]);
    record.elapsed_seconds = parse_optional(fields[6]).value();
    record.logdet_lower = parse_optional(fields[7]);
    record.logdet_upper = parse_optional(fields[8]);
    record.quad_lower = parse_optional(fields[9]);
    record.quad_upper = parse_optional(fields[10]);
    record.exact_logdet = parse_optional(fields[11]);
    record.exact_quad = parse_optional(fields[12]);
    record.estimate = parse_optional(fields[13]);
    record.exact_lml = parse_optional(fields[14]);
    record.rmse = parse_optional(fields[15]);
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<ExperimentRecord> run_bound_sweep(const Dataset& data,
                                              const std::vector<KernelFamily>& kernels,
                                              const std::vector<double>& log_lengthscales,
                                              double sigma2, double theta,
                                              Eigen::Index block_size,
                                              const std::vector<std::uint64_t>& seeds,
                                              Eigen::Index max_points) {
  std::vector<ExperimentRecord> records;
  const Eigen::Index cap =
      max_points < 0 ? data.size() : std::min(max_points, data.size());

  for (const auto family : kernels) {
    for (const double log_ell : log_lengthscales) {
      for (const auto seed : seeds) {
        Eigen::MatrixXd x = data.X;
        Eigen::VectorXd y = data.y;
        shuffle_rows(x, y, seed);
        x.conservativeResize(cap, Eigen::NoChange);
        y.conservativeResize(cap);

        const KernelSpec kernel{family, std::exp(log_ell), theta};
        StopConfig config;
        config.rtol = 0.0;  // stopping disabled
        config.block_size = std::min(block_size, cap);
        const AcgpResult result =
            acgp_run(kernel, MeanModel::zero(), NoiseModel::homoskedastic(sigma2), x, y, config);

        ExperimentRecord base;
        base.experiment = "bound-sweep";
        base.kernel = to_string(family);
        base.log_lengthscale = log_ell;
        base.seed = seed;
        base.exact_logdet = result.logdet_processed;
        base.exact_quad = result.quad_processed;
        base.exact_lml = result.lml_processed();

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

        // Terminal row: with everything processed the bounds collapse.
        ExperimentRecord final_row = base;
        final_row.s = cap;
        final_row.t = cap;
        final_row.elapsed_seconds =
            result.trace.empty() ? 0.0 : result.trace.back().elapsed_seconds;
        final_row.logdet_lower = result.logdet_processed;
        final_row.logdet_upper = result.logdet_processed;
        final_row.quad_lower = result.quad_processed;
        final_row.quad_upper = result.quad_processed;
        final_row.estimate = result.lml_processed();
        records.push_back(std::move(final_row));
      }
    }
  }
  return records;
}

std::vector<ExperimentRecord> run_lml_curve(const Dataset& data,
                                            const std::vector<KernelFamily>& kernels,
                                            const std::vector<double>& log_lengthscales,
                                            double sigma2, double theta,
                                            Eigen::Index block_size) {
  std::vector<ExperimentRecord> records;
  for (const auto family : kernels) {
    for (const double log_ell : log_lengthscales) {
      const KernelSpec kernel{family, std::exp(log_ell), theta};
      const Eigen::VectorXd curve =
          lml_curve(kernel, MeanModel::zero(), NoiseModel::homoskedastic(sigma2), data.X,
                    data.y, block_size);
      for (Eigen::Index n = 0; n < curve.size(); ++n) {
        ExperimentRecord record;
        record.experiment = "lml-curve";
        record.kernel = to_string(family);
        record.log_lengthscale = log_ell;
        record.seed = data.shuffle_seed;
        record.s = n + 1;
        record.t = n + 1;
        record.exact_lml = curve[n];
        records.push_back(std::move(record));
      }
    }
  }
  return records;
}

std::vector<ExperimentRecord> run_tune(const Dataset& train, const Dataset& test,
                                       KernelFamily family, const HyperParams& init,
                                       const TuneConfig& config, Eigen::Index exact_eval_cap) {
  const TuneResult tuned = tune(family, train.X, train.y, init, config);
  const Eigen::Index exact_n = std::min(exact_eval_cap, train.size());

  std::vector<ExperimentRecord> records;
  for (const auto& step : tuned.trajectory) {
    ExperimentRecord record;
    record.experiment = "tune";
    record.kernel = to_string(family);
    record.log_lengthscale = step.params.log_lengthscale;
    record.seed = train.shuffle_seed;
    record.s = step.restart;
    record.t = step.points_used;
    record.elapsed_seconds = step.elapsed_seconds;
    record.estimate = -step.objective;
    try {
      const ExactModel exact(step.params.kernel(family), MeanModel::zero(),
                             step.params.noise(), train.X.topRows(exact_n),
                             train.y.head(exact_n));
      record.exact_lml = exact.lml();
    } catch (const std::runtime_error&) {
      // leave the exact column empty when the prefix factorization fails
    }
    records.push_back(std::move(record));
  }

  if (!records.empty() && test.size() > 0) {
    StopConfig run_config;
    run_config.rtol = TuneConfig::tolerance(config.max_restarts - 1);
    run_config.block_size = std::min<Eigen::Index>(config.block_size, train.size());
    if (run_config.block_size % 2 != 0) run_config.block_size -= 1;
    run_config.block_size = std::max<Eigen::Index>(run_config.block_size, 2);
    run_config.max_points = config.max_points;
    const KernelSpec kernel = tuned.best.kernel(family);
    const NoiseModel noise = tuned.best.noise();
    const AcgpResult fit = acgp_run(kernel, MeanModel::zero(), noise, train.X, train.y, run_config);
    records.back().rmse = prediction_rmse(fit, kernel, MeanModel::zero(), noise, train, test);
  }
  return records;
}

double prediction_rmse(const AcgpResult& result, const KernelSpec& kernel, const MeanModel& mean,
                       const NoiseModel& noise, const Dataset& train, const Dataset& test) {
  const Prediction prediction = predict(result, kernel, mean, noise, train.X, test.X);
  return std::sqrt((prediction.mean - test.y).squaredNorm() /
                   static_cast<double>(test.size()));
}

}  // namespace acgp
