#include "immigrate/relief.hpp"

#include <limits>
#include <string>

#include "immigrate/rng.hpp"

namespace immigrate {

namespace {

int nearest_with(const Dataset& data, int n, bool same_label) {
  const int label = data.labels[static_cast<std::size_t>(n)];
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < data.n_instances(); ++j) {
    if (j == n) continue;
    if ((data.labels[static_cast<std::size_t>(j)] == label) != same_label) continue;
    const double dist = (data.features.row(j) - data.features.row(n)).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(j);
    }
  }
  if (best < 0)
    throw Error(std::string("instance ") + std::to_string(n) + " has no " +
                (same_label ? "hit" : "miss") + " neighbor");
  return best;
}

}  // namespace

int nearest_hit(const Dataset& data, int n) { return nearest_with(data, n, true); }

int nearest_miss(const Dataset& data, int n) { return nearest_with(data, n, false); }

FeatureWeights relief_iterative(const Dataset& data, int m, std::uint64_t seed) {
  validate(data);
  if (m < 1) throw Error("relief_iterative: M must be at least 1");
  const double scale = static_cast<double>(m);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(data.n_features());
  Rng rng(seed);
  for (int t = 0; t < m; ++t) {
    const int n = static_cast<int>(
        rng.below(static_cast<std::uint64_t>(data.n_instances())));
    const Eigen::RowVectorXd x = data.features.row(n);
    const Eigen::RowVectorXd hit = data.features.row(nearest_hit(data, n));
    const Eigen::RowVectorXd miss = data.features.row(nearest_miss(data, n));
    w -= (x - hit).array().square().matrix().transpose() / scale;
    w += (x - miss).array().square().matrix().transpose() / scale;
  }
  return {w, false};
}

Eigen::VectorXd relief_margin_accumulator(const Dataset& data) {
  validate(data);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(data.n_features());
  for (int n = 0; n < data.n_instances(); ++n) {
    const Eigen::RowVectorXd x = data.features.row(n);
    const Eigen::RowVectorXd hit = data.features.row(nearest_hit(data, n));
    const Eigen::RowVectorXd miss = data.features.row(nearest_miss(data, n));
    u += ((x - hit).cwiseAbs() - (x - miss).cwiseAbs()).transpose();
  }
  return u;
}

Eigen::VectorXd truncate_and_normalize(const Eigen::VectorXd& u) {
  const Eigen::VectorXd positive_part = (-u).cwiseMax(0.0);
  const double norm = positive_part.norm();
  if (norm == 0.0)
    throw Error("degenerate weights: no feature brings hits closer than misses");
  return positive_part / norm;
}

FeatureWeights relief_closed_form(const Dataset& data) {
  return {truncate_and_normalize(relief_margin_accumulator(data)), true};
}

}  // namespace immigrate
