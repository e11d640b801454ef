#include "immigrate/boosting.hpp"

#include <cmath>
#include <string>

namespace immigrate {

ImmigrateModel train_weak(const Dataset& data, const SampleWeights& weights,
                          double sigma, int weak_max_iter, std::uint64_t seed,
                          const std::optional<WeightMatrix>& initial_weights) {
  Hyperparameters hp;
  hp.sigma = sigma;
  hp.max_iterations = weak_max_iter;
  hp.seed = seed;

  TrainOptions options;
  options.instance_weights = weights.D;
  options.initial_weights = initial_weights;
  return train(data, hp, options);
}

double vote_from_error(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw Error("vote is undefined for weighted error " + std::to_string(epsilon));
  }
  return 0.5 * std::log((1.0 - epsilon) / epsilon);
}

static void check_options(const BimOptions& options) {
  if (options.rounds < 1) {
    throw Error("round budget must be at least 1, got " +
                std::to_string(options.rounds));
  }
  if (!(options.sigma_min > 0.0) || !(options.sigma_max >= options.sigma_min)) {
    throw Error("sigma schedule requires 0 < sigma_min <= sigma_max");
  }
  if (options.weak_max_iter < 1) {
    throw Error("weak learner iteration cap must be at least 1");
  }
}

BoostedModel train_bim(const Dataset& data, const BimOptions& options) {
  validate(data);
  check_options(options);
  if (data.n_classes() != 2) {
    throw Error("boosting requires a two-class dataset, got " +
                std::to_string(data.n_classes()) + " classes");
  }

  const Eigen::Index n = data.n_instances();
  const double horizon = static_cast<double>(options.rounds);
  const double decay = options.sigma_min / options.sigma_max;

  Eigen::VectorXd sample_weights =
      Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  BoostedModel model;
  int budget = options.rounds;
  int consecutive_discards = 0;

  for (int t = 1; t <= budget; ++t) {
    BoostRound round;
    round.sigma = std::max(
        options.sigma_min,
        options.sigma_max * std::pow(decay, static_cast<double>(t - 1) / horizon));

    ImmigrateModel weak =
        train_weak(data, {sample_weights}, round.sigma, options.weak_max_iter,
                   mix_seed(options.seed, static_cast<std::uint64_t>(t)),
                   options.initial_weights);

    const std::vector<int> fitted = predict(weak, data.features);
    Eigen::ArrayXd wrong(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      wrong[i] = fitted[static_cast<std::size_t>(i)] == data.labels[static_cast<std::size_t>(i)] ? 0.0 : 1.0;
    }
    round.epsilon = (sample_weights.array() * wrong).sum();

    if (round.epsilon >= 0.5 || round.epsilon == 0.0) {
      --budget;
      ++consecutive_discards;
      model.rounds.push_back(round);
      if (consecutive_discards == 3) {
        break;
      }
      continue;
    }
    consecutive_discards = 0;

    round.retained = true;
    round.vote = vote_from_error(round.epsilon);
    const double ratio = (1.0 - round.epsilon) / round.epsilon;
    sample_weights =
        (sample_weights.array() * (1.0 + (ratio - 1.0) * wrong)).matrix();
    sample_weights /= sample_weights.sum();
    round.post_update_error = (sample_weights.array() * wrong).sum();

    model.votes.push_back(round.vote);
    model.learners.push_back(std::move(weak));
    model.rounds.push_back(round);
  }

  if (model.learners.empty()) {
    throw Error("no weak learner retained: every round had weighted error 0 or >= 1/2");
  }
  model.class_ids = model.learners.front().class_ids;
  return model;
}

int predict_bim(const BoostedModel& model, const Eigen::RowVectorXd& x) {
  if (model.learners.empty()) {
    throw Error("boosted model has no learners");
  }

  Eigen::VectorXd scores = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(model.class_ids.size()));
  for (std::size_t t = 0; t < model.learners.size(); ++t) {
    const int label = predict(model.learners[t], x);
    for (std::size_t c = 0; c < model.class_ids.size(); ++c) {
      if (model.class_ids[c] == label) {
        scores[static_cast<Eigen::Index>(c)] += model.votes[t];
        break;
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < model.class_ids.size(); ++c) {
    if (scores[static_cast<Eigen::Index>(c)] > scores[static_cast<Eigen::Index>(best)]) {
      best = c;
    }
  }
  return model.class_ids[best];
}

std::vector<int> predict_bim(const BoostedModel& model,
                             const Eigen::MatrixXd& queries) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    labels.push_back(predict_bim(model, Eigen::RowVectorXd(queries.row(i))));
  }
  return labels;
}

}  // namespace immigrate
