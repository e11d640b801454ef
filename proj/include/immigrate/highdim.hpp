#pragma once

#include <vector>

#include "immigrate/boosting.hpp"
#include "immigrate/core.hpp"

namespace immigrate {

// Outcome of diagonal pre-screening: which original columns survive, plus the
// full-length diagonal weight vector they were judged by. The training
// pipelines record the full input column names so a saved screen knows what
// raw queries look like; prescreen alone leaves the list empty.
struct ScreenResult {
  std::vector<int> kept_features;
  Eigen::VectorXd diag_weights;
  std::vector<std::string> feature_names;
};

// Full model together with the screen that defines its input projection.
struct ScreenedModel {
  ImmigrateModel model;
  ScreenResult screen;
};

struct ScreenedBoostedModel {
  BoostedModel model;
  ScreenResult screen;
};

// Diagonal-restricted variant of train: the weight update keeps only the
// truncated negative diagonal of the scatter difference, normalized to unit
// Euclidean norm. Cheap enough to run on thousands of features.
Eigen::VectorXd train_diagonal(const Dataset& data, const Hyperparameters& hp);

// Keeps features whose diagonal weight reaches the threshold; falls back to
// the single best feature when none does. include_features are kept
// regardless of weight.
ScreenResult prescreen(const Eigen::VectorXd& diag_weights, double threshold,
                       const std::vector<int>& include_features = {});

ScreenedModel train_im4e_immigrate(const Dataset& data,
                                   const Hyperparameters& hp,
                                   double screen_threshold,
                                   const std::vector<int>& include_features = {});

ScreenedBoostedModel train_b4g(const Dataset& data, const BimOptions& options,
                               double screen_threshold,
                               const std::vector<int>& include_features = {});

int predict(const ScreenedModel& sm, const Eigen::RowVectorXd& x);
std::vector<int> predict(const ScreenedModel& sm, const Eigen::MatrixXd& queries);

int predict(const ScreenedBoostedModel& sbm, const Eigen::RowVectorXd& x);
std::vector<int> predict(const ScreenedBoostedModel& sbm,
                         const Eigen::MatrixXd& queries);

namespace detail {

// Diagonal of scatter_from_pairs without forming the full matrix.
Eigen::VectorXd scatter_diagonal(const PairTable& table,
                                 const Eigen::VectorXd& pair_weights);

// Diagonal starting matrix for the post-screen stage: screened weights
// renormalized to unit Frobenius norm on the kept columns.
WeightMatrix screened_initial_weights(const ScreenResult& screen);

Eigen::RowVectorXd project_row(const Eigen::RowVectorXd& x,
                               const std::vector<int>& kept);
Eigen::MatrixXd project_rows(const Eigen::MatrixXd& rows,
                             const std::vector<int>& kept);

}  // namespace detail

}  // namespace immigrate
