#pragma once

#include <cstdint>

#include "immigrate/dataset.hpp"

namespace immigrate {

struct FeatureWeights {
  Eigen::VectorXd w;
  // True when w was truncated and scaled to unit Euclidean norm; the
  // iterative form returns the raw accumulator instead.
  bool normalized = false;
};

// Index of the nearest same-label (hit) or different-label (miss) neighbor
// under Euclidean distance, ties broken by lowest index.
int nearest_hit(const Dataset& data, int n);
int nearest_miss(const Dataset& data, int n);

// M sampled weight updates with element-wise squared differences, starting
// from w = 0.
FeatureWeights relief_iterative(const Dataset& data, int m, std::uint64_t seed);

// u = sum_n (|x_n - NH(x_n)| - |x_n - NM(x_n)|) over all instances.
Eigen::VectorXd relief_margin_accumulator(const Dataset& data);

// (-u)+ scaled to unit Euclidean norm; throws if every entry truncates to 0.
Eigen::VectorXd truncate_and_normalize(const Eigen::VectorXd& u);

// Exact minimizer of the margin cost over {w >= 0, ||w||_2 = 1}.
FeatureWeights relief_closed_form(const Dataset& data);

}  // namespace immigrate
