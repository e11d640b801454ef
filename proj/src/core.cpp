#include "immigrate/core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "immigrate/pair_table.hpp"
#include "immigrate/relief.hpp"

namespace immigrate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_hyperparameters(const Hyperparameters& hp) {
  if (hp.sigma <= 0.0) throw Error("sigma must be positive");
  if (hp.max_iterations < 1) throw Error("max_iterations must be at least 1");
  if (hp.cost_tolerance <= 0.0) throw Error("cost_tolerance must be positive");
  if (hp.prune_threshold >= 1.0) throw Error("prune_threshold must be below 1");
}

Eigen::VectorXd checked_instance_weights(
    const std::optional<Eigen::VectorXd>& weights, Eigen::Index n) {
  if (!weights) return Eigen::VectorXd::Ones(n);
  if (weights->size() != n)
    throw Error("instance weights have length " + std::to_string(weights->size()) +
                ", expected " + std::to_string(n));
  if ((weights->array() < 0).any())
    throw Error("instance weights must be non-negative");
  if (std::abs(weights->sum() - 1.0) > 1e-8)
    throw Error("instance weights must sum to 1");
  return *weights;
}

double row_entropy(const Eigen::MatrixXd& rows, int n) {
  if (n < 0 || n >= rows.rows()) throw Error("entropy: instance index out of range");
  double e = 0.0;
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double p = rows(n, j);
    if (p > 0.0) e -= p * std::log(p);
  }
  return e;
}

std::vector<int> sorted_class_ids(const std::vector<int>& labels) {
  const std::set<int> ids(labels.begin(), labels.end());
  return {ids.begin(), ids.end()};
}

}  // namespace

namespace detail {

NeighborWeights neighbors_from_measurements(const Eigen::VectorXd& pair_q,
                                            const std::vector<int>& labels,
                                            double sigma) {
  if (sigma <= 0.0) throw Error("sigma must be positive");
  const auto n_total = static_cast<Eigen::Index>(labels.size());
  NeighborWeights nw{Eigen::MatrixXd::Zero(n_total, n_total),
                     Eigen::MatrixXd::Zero(n_total, n_total)};
  for (Eigen::Index n = 0; n < n_total; ++n) {
    double hit_max = -kInf;
    double miss_max = -kInf;
    for (Eigen::Index j = 0; j < n_total; ++j) {
      if (j == n) continue;
      const double v =
          -pair_q[PairTable::index(std::min(n, j), std::max(n, j), n_total)] /
          sigma;
      if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(n)]) {
        hit_max = std::max(hit_max, v);
      } else {
        miss_max = std::max(miss_max, v);
      }
    }
    if (hit_max == -kInf)
      throw Error("training impossible: instance " + std::to_string(n) +
                  " is the only member of its class");
    if (miss_max == -kInf)
      throw Error("training impossible: instance " + std::to_string(n) +
                  " has no differently labeled instance");

    double hit_sum = 0.0;
    double miss_sum = 0.0;
    for (Eigen::Index j = 0; j < n_total; ++j) {
      if (j == n) continue;
      const double v =
          -pair_q[PairTable::index(std::min(n, j), std::max(n, j), n_total)] /
          sigma;
      if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(n)]) {
        const double e = std::exp(v - hit_max);
        nw.alpha(n, j) = e;
        hit_sum += e;
      } else {
        const double e = std::exp(v - miss_max);
        nw.beta(n, j) = e;
        miss_sum += e;
      }
    }
    nw.alpha.row(n) /= hit_sum;
    nw.beta.row(n) /= miss_sum;
  }
  return nw;
}

Eigen::VectorXd pair_margin_weights(const std::vector<int>& labels,
                                    const NeighborWeights& nw,
                                    const Eigen::VectorXd& instance_weights) {
  const auto n_total = static_cast<Eigen::Index>(labels.size());
  Eigen::VectorXd s(PairTable::pair_count(n_total));
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < n_total; ++i) {
    for (Eigen::Index j = i + 1; j < n_total; ++j, ++p) {
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)])
        s[p] = instance_weights[i] * nw.alpha(i, j) +
               instance_weights[j] * nw.alpha(j, i);
      else
        s[p] = -(instance_weights[i] * nw.beta(i, j) +
                 instance_weights[j] * nw.beta(j, i));
    }
  }
  return s;
}

double cost_from_measurements(const Eigen::VectorXd& pair_q,
                              const NeighborWeights& nw,
                              const std::vector<int>& labels, double sigma,
                              const Eigen::VectorXd& instance_weights) {
  const double margin =
      pair_margin_weights(labels, nw, instance_weights).dot(pair_q);
  double entropy_gap = 0.0;
  for (int n = 0; n < static_cast<int>(labels.size()); ++n)
    entropy_gap +=
        instance_weights[n] * (row_entropy(nw.beta, n) - row_entropy(nw.alpha, n));
  return margin + sigma * entropy_gap;
}

Eigen::MatrixXd scatter_from_pairs(const PairTable& table,
                                   const Eigen::VectorXd& pair_weights) {
  Eigen::MatrixXd sigma_matrix =
      table.abs_diff.transpose() *
      (table.abs_diff.array().colwise() * pair_weights.array()).matrix();
  return 0.5 * (sigma_matrix + sigma_matrix.transpose()).eval();
}

}  // namespace detail

double WeightMatrix::min_eigenvalue() const {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (W + W.transpose()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

WeightMatrix uniform_diagonal_weights(Eigen::Index n_features) {
  return {Eigen::MatrixXd::Identity(n_features, n_features) /
          std::sqrt(static_cast<double>(n_features))};
}

WeightMatrix random_weights(Eigen::Index n_features, Rng& rng) {
  Eigen::MatrixXd raw(n_features, n_features);
  for (Eigen::Index i = 0; i < n_features; ++i)
    for (Eigen::Index j = 0; j < n_features; ++j) raw(i, j) = rng.uniform();
  Eigen::MatrixXd sym = 0.5 * (raw + raw.transpose());
  sym /= sym.norm();
  return {sym};
}

std::vector<int> hit_indices(const Dataset& data, int n) {
  std::vector<int> out;
  for (int j = 0; j < data.n_instances(); ++j)
    if (j != n && data.labels[static_cast<std::size_t>(j)] ==
                      data.labels[static_cast<std::size_t>(n)])
      out.push_back(j);
  return out;
}

std::vector<int> miss_indices(const Dataset& data, int n) {
  std::vector<int> out;
  for (int j = 0; j < data.n_instances(); ++j)
    if (data.labels[static_cast<std::size_t>(j)] !=
        data.labels[static_cast<std::size_t>(n)])
      out.push_back(j);
  return out;
}

double quadratic_manhattan(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j,
                           const WeightMatrix& wm) {
  if (x_i.size() != x_j.size() || x_i.size() != wm.W.rows() ||
      wm.W.rows() != wm.W.cols())
    throw Error("quadratic_manhattan: dimension mismatch");
  const Eigen::VectorXd d = (x_i - x_j).cwiseAbs();
  return d.dot(wm.W * d);
}

NeighborWeights update_neighbor_weights(const Dataset& data,
                                        const WeightMatrix& wm, double sigma) {
  if (wm.W.rows() != data.n_features())
    throw Error("update_neighbor_weights: weight matrix dimension mismatch");
  const PairTable table(data.features);
  return detail::neighbors_from_measurements(table.measurements(wm.W),
                                             data.labels, sigma);
}

double hit_entropy(const NeighborWeights& nw, int n) {
  return row_entropy(nw.alpha, n);
}

double miss_entropy(const NeighborWeights& nw, int n) {
  return row_entropy(nw.beta, n);
}

double cost(const Dataset& data, const WeightMatrix& wm,
            const NeighborWeights& nw, double sigma,
            const std::optional<Eigen::VectorXd>& instance_weights) {
  const PairTable table(data.features);
  return detail::cost_from_measurements(
      table.measurements(wm.W), nw, data.labels, sigma,
      checked_instance_weights(instance_weights, data.n_instances()));
}

Eigen::MatrixXd scatter_matrix(
    const Dataset& data, const NeighborWeights& nw,
    const std::optional<Eigen::VectorXd>& instance_weights) {
  if (nw.alpha.rows() != data.n_instances())
    throw Error("scatter_matrix: neighbor weights dimension mismatch");
  const PairTable table(data.features);
  return detail::scatter_from_pairs(
      table,
      detail::pair_margin_weights(
          data.labels, nw,
          checked_instance_weights(instance_weights, data.n_instances())));
}

WeightMatrix update_weight_matrix(const Eigen::MatrixXd& sigma_matrix) {
  if (sigma_matrix.rows() != sigma_matrix.cols())
    throw Error("update_weight_matrix: matrix must be square");
  const double scale = std::max(1.0, sigma_matrix.cwiseAbs().maxCoeff());
  if ((sigma_matrix - sigma_matrix.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * scale)
    throw Error("update_weight_matrix: matrix is not symmetric");

  const Eigen::MatrixXd sym = 0.5 * (sigma_matrix + sigma_matrix.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  const Eigen::VectorXd mu = solver.eigenvalues();
  if (mu.minCoeff() >= 0.0)
    throw DegenerateUpdate(
        "weight update undefined: scatter difference has no negative "
        "eigenvalue");

  Eigen::VectorXd eta = (-mu).cwiseMax(0.0);
  eta /= eta.norm();

  // The closed form guarantees positive semidefiniteness and unit Frobenius
  // norm but not element-wise non-negativity; clamping entries here would
  // break both the spectrum and the trace optimality, so small negative
  // entries are left alone. Pruning removes them when enabled.
  Eigen::MatrixXd weights = solver.eigenvectors() * eta.asDiagonal() *
                            solver.eigenvectors().transpose();
  weights = 0.5 * (weights + weights.transpose()).eval();
  weights /= weights.norm();
  return {weights};
}

WeightMatrix prune(const WeightMatrix& wm, double threshold) {
  if (threshold < 0.0) throw Error("prune: threshold must be non-negative");
  if (wm.W.maxCoeff() < threshold)
    throw Error("prune: threshold " + std::to_string(threshold) +
                " would zero every entry");
  Eigen::MatrixXd pruned = (wm.W.array() < threshold).select(0.0, wm.W);
  pruned /= pruned.norm();
  return {pruned};
}

ImmigrateModel train(const Dataset& data, const Hyperparameters& hp,
                     const TrainOptions& options) {
  validate(data);
  const Eigen::Index a = data.n_features();
  check_hyperparameters(hp);
  const Eigen::VectorXd instance_weights =
      options.instance_weights
          ? checked_instance_weights(options.instance_weights, data.n_instances())
          : Eigen::VectorXd::Ones(data.n_instances());
  if (options.initial_weights && options.initial_weights->W.rows() != a)
    throw Error("train: initial weight matrix dimension mismatch");

  const PairTable table(data.features);
  Rng rng(hp.seed);
  WeightMatrix weights =
      options.initial_weights ? *options.initial_weights : random_weights(a, rng);

  TrainDiagnostics diag;
  Eigen::VectorXd pair_q = table.measurements(weights.W);
  double prev_cost = 0.0;
  for (int t = 1; t <= hp.max_iterations; ++t) {
    const NeighborWeights nw =
        detail::neighbors_from_measurements(pair_q, data.labels, hp.sigma);
    const Eigen::MatrixXd sigma_matrix = detail::scatter_from_pairs(
        table, detail::pair_margin_weights(data.labels, nw, instance_weights));

    bool degenerate = false;
    try {
      weights = update_weight_matrix(sigma_matrix);
    } catch (const DegenerateUpdate&) {
      degenerate = true;
      if (t == 1 && !options.initial_weights)
        weights = uniform_diagonal_weights(a);
    }

    pair_q = table.measurements(weights.W);
    const double c = detail::cost_from_measurements(pair_q, nw, data.labels,
                                                    hp.sigma, instance_weights);
    diag.cost_history.push_back(c);
    diag.final_cost = c;
    diag.iterations = t;
    if (options.observer) options.observer(weights, nw, c);
    if (degenerate) {
      diag.degenerate_stop = true;
      break;
    }
    if (t >= 2 && std::abs(c - prev_cost) < hp.cost_tolerance * (1.0 + std::abs(c)))
      break;
    prev_cost = c;
  }

  if (hp.prune_enabled) {
    const double threshold = hp.prune_threshold < 0.0
                                 ? 1.0 / static_cast<double>(a)
                                 : hp.prune_threshold;
    weights = prune(weights, threshold);
  }

  return {weights, hp.sigma, data, sorted_class_ids(data.labels), diag};
}

int predict(const ImmigrateModel& model, const Eigen::RowVectorXd& x) {
  const Dataset& training = model.training_data;
  if (x.size() != training.n_features())
    throw Error("predict: query has " + std::to_string(x.size()) +
                " features, model expects " +
                std::to_string(training.n_features()));

  const Eigen::MatrixXd diffs = (training.features.rowwise() - x).cwiseAbs();
  const Eigen::VectorXd q =
      (diffs * model.weights.W).cwiseProduct(diffs).rowwise().sum();

  double best_score = kInf;
  int best_class = -1;
  for (const int c : model.class_ids) {
    double shift = -kInf;
    for (Eigen::Index n = 0; n < q.size(); ++n)
      if (training.labels[static_cast<std::size_t>(n)] == c)
        shift = std::max(shift, -q[n] / model.sigma);
    if (shift == -kInf)
      throw Error("predict: class " + std::to_string(c) +
                  " has no training instances");

    double total = 0.0;
    double score = 0.0;
    for (Eigen::Index n = 0; n < q.size(); ++n) {
      if (training.labels[static_cast<std::size_t>(n)] != c) continue;
      const double p = std::exp(-q[n] / model.sigma - shift);
      total += p;
      score += p * q[n];
    }
    score /= total;
    if (score < best_score) {
      best_score = score;
      best_class = c;
    }
  }
  return best_class;
}

std::vector<int> predict(const ImmigrateModel& model,
                         const Eigen::MatrixXd& queries) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    out.push_back(predict(model, Eigen::RowVectorXd(queries.row(i))));
  return out;
}

const std::vector<double>& sigma_grid() {
  static const std::vector<double> grid{4.0, 2.0, 1.0, 0.5, 0.25};
  return grid;
}

Hyperparameters tune_sigma(const Dataset& data, const Hyperparameters& hp_base,
                           int inner_folds) {
  const FoldAssignment folds = stratified_kfold(data, inner_folds, hp_base.seed);

  std::vector<Dataset> train_sets;
  std::vector<std::vector<int>> test_sets;
  for (int f = 0; f < inner_folds; ++f) {
    train_sets.push_back(subset(data, folds.train_indices(f)));
    test_sets.push_back(folds.test_indices(f));
  }

  int best_correct = -1;
  Hyperparameters best = hp_base;
  for (const double sigma : sigma_grid()) {
    for (const bool prune_enabled : {false, true}) {
      Hyperparameters hp = hp_base;
      hp.sigma = sigma;
      hp.prune_enabled = prune_enabled;
      int correct = 0;
      for (int f = 0; f < inner_folds; ++f) {
        const ImmigrateModel model = train(train_sets[static_cast<std::size_t>(f)], hp);
        for (const int i : test_sets[static_cast<std::size_t>(f)])
          correct += predict(model, Eigen::RowVectorXd(data.features.row(i))) ==
                     data.labels[static_cast<std::size_t>(i)];
      }
      if (correct > best_correct) {
        best_correct = correct;
        best = hp;
      }
    }
  }
  return best;
}

}  // namespace immigrate
