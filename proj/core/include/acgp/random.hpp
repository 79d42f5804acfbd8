#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace acgp {

/// Seeded random draws with sequences pinned by this implementation rather
/// than by the standard library's unspecified distribution algorithms, so
/// generated datasets and shuffles are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double normal() {  // Box-Muller, one spare cached
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t integer(std::uint64_t bound) {  // [0, bound)
    return gen_() % bound;
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    }
    return m;
  }

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<Eigen::Index> permutation(Eigen::Index n) {
    std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(integer(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Rows of X and entries of y reordered by the same seeded permutation.
inline void shuffle_rows(Eigen::MatrixXd& X, Eigen::VectorXd& y, std::uint64_t seed) {
  Rng rng(seed);
  const auto perm = rng.permutation(X.rows());
  Eigen::MatrixXd xs(X.rows(), X.cols());
  Eigen::VectorXd ys(y.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    xs.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
    ys[i] = y[perm[static_cast<std::size_t>(i)]];
  }
  X = std::move(xs);
  y = std::move(ys);
}

}  // namespace acgp
