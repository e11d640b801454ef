#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "immigrate/dataset.hpp"
#include "immigrate/pair_table.hpp"
#include "immigrate/rng.hpp"

namespace immigrate {

// Symmetric, element-wise non-negative interaction weights with unit
// Frobenius norm. Off-diagonal entries weigh feature pairs, diagonal
// entries main effects.
struct WeightMatrix {
  Eigen::MatrixXd W;

  double asymmetry() const { return (W - W.transpose()).cwiseAbs().maxCoeff(); }
  double frobenius() const { return W.norm(); }
  double min_entry() const { return W.minCoeff(); }
  double min_eigenvalue() const;
};

WeightMatrix uniform_diagonal_weights(Eigen::Index n_features);
WeightMatrix random_weights(Eigen::Index n_features, Rng& rng);

// Row n holds the softmax distribution over instance n's hits (alpha) and
// misses (beta); entries outside those index sets stay zero.
struct NeighborWeights {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;
};

struct Hyperparameters {
  double sigma = 1.0;
  int max_iterations = 10;
  double cost_tolerance = 1e-4;  // relative to 1 + |C|
  bool prune_enabled = false;
  double prune_threshold = -1.0;  // negative resolves to 1/A
  std::uint64_t seed = 42;
};

struct TrainDiagnostics {
  int iterations = 0;
  double final_cost = 0.0;
  std::vector<double> cost_history;
  bool degenerate_stop = false;
};

struct ImmigrateModel {
  WeightMatrix weights;
  double sigma = 1.0;
  Dataset training_data;
  std::vector<int> class_ids;
  TrainDiagnostics diagnostics;
};

// Raised when every eigenvalue of the scatter difference is non-negative,
// leaving the weight update undefined.
struct DegenerateUpdate : Error {
  using Error::Error;
};

std::vector<int> hit_indices(const Dataset& data, int n);
std::vector<int> miss_indices(const Dataset& data, int n);

// |x_i - x_j|^T W |x_i - x_j| with element-wise absolute value.
double quadratic_manhattan(const Eigen::VectorXd& x_i,
                           const Eigen::VectorXd& x_j, const WeightMatrix& wm);

NeighborWeights update_neighbor_weights(const Dataset& data,
                                        const WeightMatrix& wm, double sigma);

double hit_entropy(const NeighborWeights& nw, int n);
double miss_entropy(const NeighborWeights& nw, int n);

// Margin cost plus sigma-scaled entropy gap; instance weights, when given,
// scale both per-instance terms.
double cost(const Dataset& data, const WeightMatrix& wm,
            const NeighborWeights& nw, double sigma,
            const std::optional<Eigen::VectorXd>& instance_weights = {});

Eigen::MatrixXd scatter_matrix(
    const Dataset& data, const NeighborWeights& nw,
    const std::optional<Eigen::VectorXd>& instance_weights = {});

// Closed-form minimizer of trace(W Sigma) over the feasible set; throws
// DegenerateUpdate when Sigma has no negative eigenvalue.
WeightMatrix update_weight_matrix(const Eigen::MatrixXd& sigma_matrix);

WeightMatrix prune(const WeightMatrix& wm, double threshold);

struct TrainOptions {
  std::optional<Eigen::VectorXd> instance_weights;
  std::optional<WeightMatrix> initial_weights;
  // Called once per iteration with the accepted weight matrix, the
  // neighbor weights it was derived from, and the cost after the update.
  std::function<void(const WeightMatrix&, const NeighborWeights&, double)>
      observer;
};

ImmigrateModel train(const Dataset& data, const Hyperparameters& hp,
                     const TrainOptions& options = {});

int predict(const ImmigrateModel& model, const Eigen::RowVectorXd& x);
std::vector<int> predict(const ImmigrateModel& model,
                         const Eigen::MatrixXd& queries);

// Candidate temperatures {4, 2, 1, 0.5, 0.25}, largest first.
const std::vector<double>& sigma_grid();

// Picks sigma and pruning by inner stratified cross-validation accuracy;
// ties prefer larger sigma, then pruning off.
Hyperparameters tune_sigma(const Dataset& data, const Hyperparameters& hp_base,
                           int inner_folds);

// Shared internals operating on a prebuilt pair table so training loops
// avoid rebuilding distances each step. instance_weights is taken as-is.
namespace detail {

NeighborWeights neighbors_from_measurements(const Eigen::VectorXd& pair_q,
                                            const std::vector<int>& labels,
                                            double sigma);

// Signed weight of each pair's outer product in the scatter difference.
Eigen::VectorXd pair_margin_weights(const std::vector<int>& labels,
                                    const NeighborWeights& nw,
                                    const Eigen::VectorXd& instance_weights);

double cost_from_measurements(const Eigen::VectorXd& pair_q,
                              const NeighborWeights& nw,
                              const std::vector<int>& labels, double sigma,
                              const Eigen::VectorXd& instance_weights);

Eigen::MatrixXd scatter_from_pairs(const PairTable& table,
                                   const Eigen::VectorXd& pair_weights);

}  // namespace detail

}  // namespace immigrate
