#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "immigrate/core.hpp"

namespace immigrate {

struct SampleWeights {
  Eigen::VectorXd D;
};

// Per-round bookkeeping, including discarded rounds.
struct BoostRound {
  double sigma = 0.0;
  double epsilon = 0.0;
  double vote = 0.0;
  bool retained = false;
  // Weighted error of the retained learner under the reweighted samples;
  // the update rule pins this at 1/2.
  double post_update_error = 0.0;
};

struct BoostedModel {
  std::vector<ImmigrateModel> learners;
  std::vector<double> votes;
  std::vector<int> class_ids;
  std::vector<BoostRound> rounds;
};

struct BimOptions {
  int rounds = 100;  // T
  double sigma_max = 4.0;
  double sigma_min = 0.2;
  int weak_max_iter = 3;
  std::uint64_t seed = 42;
  // Fixed starting point for every weak learner (e.g. a screened diagonal);
  // unset means a fresh random start per round.
  std::optional<WeightMatrix> initial_weights;
};

// One sample-weighted learner with a capped iteration budget.
ImmigrateModel train_weak(const Dataset& data, const SampleWeights& weights,
                          double sigma, int weak_max_iter, std::uint64_t seed,
                          const std::optional<WeightMatrix>& initial_weights = {});

double vote_from_error(double epsilon);

BoostedModel train_bim(const Dataset& data, const BimOptions& options = {});

int predict_bim(const BoostedModel& model, const Eigen::RowVectorXd& x);
std::vector<int> predict_bim(const BoostedModel& model,
                             const Eigen::MatrixXd& queries);

}  // namespace immigrate
