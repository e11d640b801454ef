#include "immigrate/highdim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace immigrate {

namespace detail {

Eigen::VectorXd scatter_diagonal(const PairTable& table,
                                 const Eigen::VectorXd& pair_weights) {
  return (table.abs_diff.array().square().matrix().transpose() * pair_weights);
}

WeightMatrix screened_initial_weights(const ScreenResult& screen) {
  const Eigen::Index k = static_cast<Eigen::Index>(screen.kept_features.size());
  Eigen::VectorXd kept(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    kept[c] = screen.diag_weights[screen.kept_features[static_cast<std::size_t>(c)]];
  }
  const double norm = kept.norm();
  if (norm == 0.0) {
    throw Error("screened weights are all zero; cannot seed the weight matrix");
  }
  WeightMatrix wm;
  wm.W = (kept / norm).asDiagonal();
  return wm;
}

Eigen::RowVectorXd project_row(const Eigen::RowVectorXd& x,
                               const std::vector<int>& kept) {
  if (!kept.empty() && kept.back() >= x.size()) {
    throw Error("projection expects at least " +
                std::to_string(kept.back() + 1) + " features, got " +
                std::to_string(x.size()));
  }
  Eigen::RowVectorXd out(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    out[static_cast<Eigen::Index>(c)] = x[kept[c]];
  }
  return out;
}

Eigen::MatrixXd project_rows(const Eigen::MatrixXd& rows,
                             const std::vector<int>& kept) {
  if (!kept.empty() && kept.back() >= rows.cols()) {
    throw Error("projection expects at least " +
                std::to_string(kept.back() + 1) + " features, got " +
                std::to_string(rows.cols()));
  }
  Eigen::MatrixXd out(rows.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = rows.col(kept[c]);
  }
  return out;
}

}  // namespace detail

Eigen::VectorXd train_diagonal(const Dataset& data, const Hyperparameters& hp) {
  validate(data);
  if (!(hp.sigma > 0.0)) throw Error("sigma must be positive");
  if (hp.max_iterations < 1) throw Error("max_iterations must be at least 1");
  if (!(hp.cost_tolerance > 0.0)) throw Error("cost_tolerance must be positive");

  const Eigen::Index a = data.n_features();
  const PairTable table(data.features);
  const Eigen::VectorXd instance_weights =
      Eigen::VectorXd::Ones(data.n_instances());
  const Eigen::VectorXd uniform =
      Eigen::VectorXd::Constant(a, 1.0 / std::sqrt(static_cast<double>(a)));

  Eigen::VectorXd w = uniform;
  Eigen::VectorXd pair_q = table.measurements(w);
  double prev_cost = 0.0;
  for (int t = 1; t <= hp.max_iterations; ++t) {
    const NeighborWeights nw =
        detail::neighbors_from_measurements(pair_q, data.labels, hp.sigma);
    const Eigen::VectorXd sigma_diag = detail::scatter_diagonal(
        table, detail::pair_margin_weights(data.labels, nw, instance_weights));

    bool degenerate = false;
    const Eigen::VectorXd negative_part = (-sigma_diag).cwiseMax(0.0);
    const double norm = negative_part.norm();
    if (norm == 0.0) {
      degenerate = true;
      if (t == 1) w = uniform;
    } else {
      w = negative_part / norm;
    }

    pair_q = table.measurements(w);
    const double c = detail::cost_from_measurements(pair_q, nw, data.labels,
                                                    hp.sigma, instance_weights);
    if (degenerate) break;
    if (t >= 2 && std::abs(c - prev_cost) < hp.cost_tolerance * (1.0 + std::abs(c)))
      break;
    prev_cost = c;
  }
  return w;
}

ScreenResult prescreen(const Eigen::VectorXd& diag_weights, double threshold,
                       const std::vector<int>& include_features) {
  if (threshold < 0.0) throw Error("screen threshold must be non-negative");
  const Eigen::Index a = diag_weights.size();
  if (a == 0) throw Error("cannot screen an empty weight vector");

  std::set<int> kept;
  for (Eigen::Index i = 0; i < a; ++i) {
    if (diag_weights[i] >= threshold) kept.insert(static_cast<int>(i));
  }
  if (kept.empty()) {
    Eigen::Index best = 0;
    diag_weights.maxCoeff(&best);
    kept.insert(static_cast<int>(best));
  }
  for (int idx : include_features) {
    if (idx < 0 || idx >= a) {
      throw Error("include list names feature " + std::to_string(idx) +
                  " outside [0, " + std::to_string(a) + ")");
    }
    kept.insert(idx);
  }

  ScreenResult result;
  result.kept_features.assign(kept.begin(), kept.end());
  result.diag_weights = diag_weights;
  return result;
}

ScreenedModel train_im4e_immigrate(const Dataset& data,
                                   const Hyperparameters& hp,
                                   double screen_threshold,
                                   const std::vector<int>& include_features) {
  const Eigen::VectorXd diag = train_diagonal(data, hp);
  ScreenResult screen = prescreen(diag, screen_threshold, include_features);
  screen.feature_names = data.feature_names;

  const Dataset projected = select_features(data, screen.kept_features);
  TrainOptions options;
  options.initial_weights = detail::screened_initial_weights(screen);

  ScreenedModel sm;
  sm.model = train(projected, hp, options);
  sm.screen = std::move(screen);
  return sm;
}

ScreenedBoostedModel train_b4g(const Dataset& data, const BimOptions& options,
                               double screen_threshold,
                               const std::vector<int>& include_features) {
  Hyperparameters screen_hp;
  screen_hp.sigma = options.sigma_max;
  screen_hp.seed = options.seed;
  const Eigen::VectorXd diag = train_diagonal(data, screen_hp);
  ScreenResult screen = prescreen(diag, screen_threshold, include_features);
  screen.feature_names = data.feature_names;

  const Dataset projected = select_features(data, screen.kept_features);
  BimOptions projected_options = options;
  projected_options.initial_weights = detail::screened_initial_weights(screen);

  ScreenedBoostedModel sbm;
  sbm.model = train_bim(projected, projected_options);
  sbm.screen = std::move(screen);
  return sbm;
}

int predict(const ScreenedModel& sm, const Eigen::RowVectorXd& x) {
  return predict(sm.model, detail::project_row(x, sm.screen.kept_features));
}

std::vector<int> predict(const ScreenedModel& sm, const Eigen::MatrixXd& queries) {
  return predict(sm.model, detail::project_rows(queries, sm.screen.kept_features));
}

int predict(const ScreenedBoostedModel& sbm, const Eigen::RowVectorXd& x) {
  return predict_bim(sbm.model, detail::project_row(x, sbm.screen.kept_features));
}

std::vector<int> predict(const ScreenedBoostedModel& sbm,
                         const Eigen::MatrixXd& queries) {
  return predict_bim(sbm.model,
                     detail::project_rows(queries, sbm.screen.kept_features));
}

}  // namespace immigrate
