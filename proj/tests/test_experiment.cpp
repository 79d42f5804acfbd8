#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "acgp/exact_gp.hpp"
#include "acgp/experiment.hpp"

using namespace acgp;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream stream(path);
  std::ostringstream out;
  out << stream.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("bound sweep emits the expected row grid with a collapsed final row") {
  const Dataset data = gen_synthetic("visualization", 160, 3);
  const std::vector<KernelFamily> kernels{KernelFamily::SquaredExponential,
                                          KernelFamily::OrnsteinUhlenbeck};
  const std::vector<double> log_ells{-1.0, 0.0};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto records = run_bound_sweep(data, kernels, log_ells, 1e-3, 1.0, 32, seeds);

  // 160/32 = 5 blocks: 4 bound evaluations plus the terminal row
  const std::size_t rows_per_run = 5;
  CHECK(records.size() == kernels.size() * log_ells.size() * seeds.size() * rows_per_run);

  for (std::size_t i = 0; i < records.size(); i += rows_per_run) {
    const auto& final_row = records[i + rows_per_run - 1];
    CHECK(final_row.s == 160);
    CHECK(final_row.t == 160);
    CHECK(*final_row.logdet_lower == *final_row.exact_logdet);
    CHECK(*final_row.logdet_upper == *final_row.exact_logdet);
    CHECK(*final_row.quad_lower == *final_row.exact_quad);
    CHECK(*final_row.quad_upper == *final_row.exact_quad);
    for (std::size_t k = 0; k < rows_per_run; ++k) {
      CHECK(records[i + k].exact_logdet == records[i].exact_logdet);
    }
  }
}

TEST_CASE("lml curve records one row per prefix") {
  const Dataset data = gen_synthetic("visualization", 64, 5);
  const auto records = run_lml_curve(data, {KernelFamily::SquaredExponential}, {0.0}, 0.1, 1.0, 16);
  REQUIRE(records.size() == 64);
  CHECK(records.front().s == 1);
  CHECK(records.back().s == 64);
  CHECK(records.back().exact_lml.has_value());
}

TEST_CASE("tune records are non-increasing within a restart and end with an RMSE") {
  Dataset data = gen_synthetic("visualization", 96, 7);
  Dataset train{data.X.topRows(64), data.y.head(64), "train", 7, false};
  Dataset test{data.X.bottomRows(32), data.y.tail(32), "test", 7, false};

  TuneConfig config;
  config.max_restarts = 2;
  config.max_steps_per_restart = 4;
  config.block_size = 32;
  const auto records = run_tune(train, test, KernelFamily::Matern32,
                                HyperParams{0.0, 0.0, std::log(0.5)}, config, 64);
  REQUIRE(!records.empty());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].s == records[i - 1].s) {
      CHECK(*records[i].estimate >= *records[i - 1].estimate - 1e-12);
    }
  }
  CHECK(records.back().rmse.has_value());
  CHECK(*records.back().rmse >= 0.0);
  CHECK(records.front().exact_lml.has_value());
}

TEST_CASE("prediction RMSE with stopping disabled matches the exact model") {
  const Dataset data = gen_synthetic("visualization", 96, 13);
  const Dataset train{data.X.topRows(64), data.y.head(64), "train", 13, false};
  const Dataset test{data.X.bottomRows(32), data.y.tail(32), "test", 13, false};

  const KernelSpec kernel{KernelFamily::Matern52, 1.5, 9.0};
  const NoiseModel noise = NoiseModel::homoskedastic(2.25);

  StopConfig config;
  config.rtol = 0.0;
  config.block_size = 16;
  const AcgpResult fit = acgp_run(kernel, MeanModel::zero(), noise, train.X, train.y, config);
  const double rmse = prediction_rmse(fit, kernel, MeanModel::zero(), noise, train, test);

  const ExactModel exact(kernel, MeanModel::zero(), noise, train.X, train.y);
  const auto [mean, variance] = exact.predict(train.size(), test.X);
  const double exact_rmse =
      std::sqrt((mean - test.y).squaredNorm() / static_cast<double>(test.size()));
  CHECK(rmse == doctest::Approx(exact_rmse).epsilon(1e-6));
}

TEST_CASE("record files are schema-stable and byte-identical across reruns") {
  const Dataset data = gen_synthetic("visualization", 96, 21);
  const auto records =
      run_bound_sweep(data, {KernelFamily::SquaredExponential}, {0.0}, 1e-3, 1.0, 32, {4, 5});

  const std::string path_a = std::string(std::tmpnam(nullptr)) + ".csv";
  const std::string path_b = std::string(std::tmpnam(nullptr)) + ".csv";
  write_records_csv(path_a, records);
  const auto records_again =
      run_bound_sweep(data, {KernelFamily::SquaredExponential}, {0.0}, 1e-3, 1.0, 32, {4, 5});
  write_records_csv(path_b, records_again);

  std::string content_a = read_file(path_a);
  std::string content_b = read_file(path_b);
  // the elapsed column is wall-clock and may differ; blank it out row by row
  const auto strip_elapsed = [](const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
      std::stringstream row(line);
      std::string field;
      std::size_t index = 0;
      bool first = true;
      while (std::getline(row, field, ',')) {
        if (!first) out << ',';
        out << (index == 6 ? std::string() : field);
        first = false;
        ++index;
      }
      out << '\n';
    }
    return out.str();
  };
  CHECK(strip_elapsed(content_a) == strip_elapsed(content_b));

  // parsing back reproduces the records
  const auto parsed = read_records_csv(path_a);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].experiment == records[i].experiment);
    CHECK(parsed[i].kernel == records[i].kernel);
    CHECK(parsed[i].s == records[i].s);
    CHECK(parsed[i].logdet_lower == records[i].logdet_lower);
    CHECK(parsed[i].exact_lml == records[i].exact_lml);
  }
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("numbers round-trip through their formatted form") {
  for (const double value : {1.0 / 3.0, -2.5e-17, 123456.789012345, 0.0, 1e300}) {
    const std::string text = format_double(value);
    CHECK(std::stod(text) == value);
  }
}
