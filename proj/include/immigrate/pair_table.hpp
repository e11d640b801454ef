#pragma once

#include <Eigen/Dense>

namespace immigrate {

// Cache of |x_i - x_j| rows for all unordered instance pairs (i < j),
// laid out so the measurement of every pair is a single matrix product.
// Training touches each pair several times per iteration; building the
// table once keeps those passes at BLAS speed.
struct PairTable {
  Eigen::Index n_instances = 0;
  Eigen::MatrixXd abs_diff;  // pair_count x A

  static Eigen::Index pair_count(Eigen::Index n) { return n * (n - 1) / 2; }

  // Flat position of pair (i, j) with i < j.
  static Eigen::Index index(Eigen::Index i, Eigen::Index j, Eigen::Index n) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

  explicit PairTable(const Eigen::MatrixXd& features)
      : n_instances(features.rows()),
        abs_diff(pair_count(features.rows()), features.cols()) {
    Eigen::Index p = 0;
    for (Eigen::Index i = 0; i < n_instances; ++i)
      for (Eigen::Index j = i + 1; j < n_instances; ++j)
        abs_diff.row(p++) = (features.row(i) - features.row(j)).cwiseAbs();
  }

  // q(x_i, x_j) for every pair under the full matrix W.
  Eigen::VectorXd measurements(const Eigen::MatrixXd& weights) const {
    return (abs_diff * weights).cwiseProduct(abs_diff).rowwise().sum();
  }

  // q under a diagonal W given as a vector of diagonal entries.
  Eigen::VectorXd measurements(const Eigen::VectorXd& diagonal) const {
    return abs_diff.cwiseProduct(abs_diff) * diagonal;
  }
};

}  // namespace immigrate
