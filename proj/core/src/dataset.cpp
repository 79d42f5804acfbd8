#include "acgp/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "acgp/random.hpp"

namespace acgp {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool parse_double(const std::string& field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc() && result.ptr == last && !field.empty();
}

}  // namespace

std::pair<Dataset, Dataset> load_csv(const std::string& path, const std::string& target_column,
                                     double split_fraction, std::uint64_t seed) {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw std::invalid_argument("load_csv: split fraction must be in (0, 1)");
  }
  std::ifstream stream(path);
  if (!stream) throw std::runtime_error("load_csv: cannot open " + path);

  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  bool saw_header = false;
  std::size_t line_number = 0;

  while (std::getline(stream, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].empty()) {
        throw std::runtime_error("load_csv: missing value at line " +
                                 std::to_string(line_number) + ", column " + std::to_string(i));
      }
      if (!parse_double(fields[i], values[i])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (line_number == 1) {
        header = fields;
        saw_header = true;
        continue;
      }
      throw std::runtime_error("load_csv: non-numeric field at line " +
                               std::to_string(line_number));
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw std::runtime_error("load_csv: ragged row at line " + std::to_string(line_number));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw std::runtime_error("load_csv: no data rows in " + path);
  const auto n_cols = rows.front().size();

  std::size_t target = n_cols;  // resolve the target column
  if (saw_header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == target_column) target = i;
    }
  }
  if (target == n_cols) {
    double index = 0.0;
    if (parse_double(target_column, index) && index >= 0 && index < static_cast<double>(n_cols)) {
      target = static_cast<std::size_t>(index);
    } else {
      throw std::invalid_argument("load_csv: cannot resolve target column '" + target_column + "'");
    }
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(n_cols - 1));
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index c_out = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (c == target) {
        y[r] = rows[static_cast<std::size_t>(r)][c];
      } else {
        x(r, c_out++) = rows[static_cast<std::size_t>(r)][c];
      }
    }
  }

  shuffle_rows(x, y, seed);

  Eigen::Index n_train = static_cast<Eigen::Index>(std::llround(split_fraction * static_cast<double>(n)));
  n_train = std::max<Eigen::Index>(1, std::min(n_train, n - 1));

  Dataset train{x.topRows(n_train), y.head(n_train), path + ":train", seed, false};
  Dataset test{x.bottomRows(n - n_train), y.tail(n - n_train), path + ":test", seed, false};
  const Standardization stats = standardize_in_place(train);
  stats.apply(test);
  test.standardized = true;
  return {std::move(train), std::move(test)};
}

double synthetic_truth(const std::string& kind, double x) {
  if (kind == "fig1") return 2.0 * std::sin(2.0 * M_PI * x / 5.0) + 0.479 * x - 2.5;
  if (kind == "visualization") return 2.0 * std::sin(2.0 * M_PI * x / 5.0) + 0.5 * x;
  throw std::invalid_argument("unknown synthetic kind: " + kind);
}

Dataset gen_synthetic(const std::string& kind, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_synthetic: need at least one point");
  double input_scale = 0.0;
  double noise_std = 0.0;
  if (kind == "fig1") {
    input_scale = 10.0;
    noise_std = std::sqrt(0.1);
  } else if (kind == "visualization") {
    input_scale = 5.0;
    noise_std = 1.5;
  } else {
    throw std::invalid_argument("unknown synthetic kind: " + kind);
  }

  Rng rng(seed);
  Dataset data;
  data.X.resize(n, 1);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = input_scale * rng.normal();
    data.X(i, 0) = x;
    data.y[i] = synthetic_truth(kind, x) + noise_std * rng.normal();
  }
  data.name = kind;
  data.shuffle_seed = seed;
  return data;
}

void Standardization::apply(Dataset& data) const {
  if (data.X.cols() != x_mean.size()) {
    throw std::invalid_argument("Standardization: column count mismatch");
  }
  data.X.rowwise() -= x_mean.transpose();
  data.X.array().rowwise() /= x_scale.transpose().array();
  data.y.array() -= y_mean;
  data.y /= y_scale;
  data.standardized = true;
}

Standardization standardize_in_place(Dataset& train) {
  const auto n = static_cast<double>(train.size());
  Standardization stats;
  stats.x_mean = train.X.colwise().mean();
  stats.x_scale.resize(train.X.cols());
  for (Eigen::Index c = 0; c < train.X.cols(); ++c) {
    const double var = (train.X.col(c).array() - stats.x_mean[c]).square().sum() / n;
    stats.x_scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  stats.y_mean = train.y.mean();
  const double y_var = (train.y.array() - stats.y_mean).square().sum() / n;
  stats.y_scale = y_var > 0.0 ? std::sqrt(y_var) : 1.0;
  stats.apply(train);
  return stats;
}

}  // namespace acgp
