#include "immigrate/eval.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "immigrate/relief.hpp"

namespace immigrate {

std::string describe(const LearnerSpec& spec) {
  std::ostringstream out;
  switch (spec.kind) {
    case LearnerKind::majority:
      return "majority";
    case LearnerKind::relief:
      return "relief";
    case LearnerKind::immigrate:
      out << "immigrate(";
      if (spec.tune) {
        out << "tuned";
      } else {
        out << "sigma=" << spec.hp.sigma
            << (spec.hp.prune_enabled ? ",prune" : "");
      }
      out << ")";
      return out.str();
    case LearnerKind::bim:
      out << "bim(T=" << spec.boost.rounds << ")";
      return out.str();
    case LearnerKind::im4e_immigrate:
      out << "im4e-immigrate(sigma=" << spec.hp.sigma << ")";
      return out.str();
    case LearnerKind::b4g:
      out << "b4g(T=" << spec.boost.rounds << ")";
      return out.str();
  }
  return "unknown";
}

static int majority_class(const std::vector<int>& labels) {
  std::vector<int> counts;
  for (int label : labels) {
    if (label >= static_cast<int>(counts.size())) counts.resize(label + 1, 0);
    ++counts[label];
  }
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

// 1-NN under the squared distance weighted by Relief's closed-form feature
// weights; nearest-index tie break keeps it deterministic.
static std::vector<int> relief_predict(const Dataset& train,
                                       const Eigen::MatrixXd& queries) {
  const Eigen::VectorXd w = relief_closed_form(train).w;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    Eigen::Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < train.n_instances(); ++i) {
      const double dist =
          ((train.features.row(i) - queries.row(q)).array().square() *
           w.transpose().array())
              .sum();
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    out.push_back(train.labels[static_cast<std::size_t>(best)]);
  }
  return out;
}

double evaluate_split(const Dataset& data, const LearnerSpec& spec,
                      const std::vector<int>& train_rows,
                      const std::vector<int>& test_rows, std::uint64_t seed) {
  if (train_rows.empty() || test_rows.empty()) {
    throw Error("evaluation needs non-empty train and test row sets");
  }
  if (spec.tune && spec.kind != LearnerKind::immigrate) {
    throw Error("tuning is only supported for the immigrate learner");
  }

  const auto [train_data, params] = standardize(subset(data, train_rows));
  const Dataset test_data =
      apply_standardization(subset(data, test_rows), params);

  const double threshold =
      spec.screen_threshold < 0.0
          ? 2.0 / static_cast<double>(train_data.n_features())
          : spec.screen_threshold;

  std::vector<int> predicted;
  switch (spec.kind) {
    case LearnerKind::majority: {
      predicted.assign(test_data.labels.size(), majority_class(train_data.labels));
      break;
    }
    case LearnerKind::relief: {
      predicted = relief_predict(train_data, test_data.features);
      break;
    }
    case LearnerKind::immigrate: {
      Hyperparameters hp = spec.hp;
      hp.seed = seed;
      if (spec.tune) hp = tune_sigma(train_data, hp, 3);
      predicted = predict(train(train_data, hp), test_data.features);
      break;
    }
    case LearnerKind::bim: {
      BimOptions opt = spec.boost;
      opt.seed = seed;
      predicted = predict_bim(train_bim(train_data, opt), test_data.features);
      break;
    }
    case LearnerKind::im4e_immigrate: {
      Hyperparameters hp = spec.hp;
      hp.seed = seed;
      predicted = predict(train_im4e_immigrate(train_data, hp, threshold),
                          test_data.features);
      break;
    }
    case LearnerKind::b4g: {
      BimOptions opt = spec.boost;
      opt.seed = seed;
      predicted = predict(train_b4g(train_data, opt, threshold),
                          test_data.features);
      break;
    }
  }

  Eigen::Index correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == test_data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

CVReport cross_validate(const Dataset& data, const LearnerSpec& spec, int k,
                        int repeats, std::uint64_t seed) {
  validate(data);
  if (k < 2) throw Error("cross-validation needs at least 2 folds");
  if (repeats < 1) throw Error("cross-validation needs at least 1 repeat");

  CVReport report;
  report.per_trial_accuracies.reserve(static_cast<std::size_t>(k) * repeats);
  for (int r = 0; r < repeats; ++r) {
    const FoldAssignment folds =
        stratified_kfold(data, k, mix_seed(seed, static_cast<std::uint64_t>(r)));
    for (int f = 0; f < k; ++f) {
      const std::uint64_t cell_seed =
          mix_seed(mix_seed(seed, static_cast<std::uint64_t>(r)),
                   static_cast<std::uint64_t>(f));
      try {
        report.per_trial_accuracies.push_back(evaluate_split(
            data, spec, folds.train_indices(f), folds.test_indices(f), cell_seed));
      } catch (const Error& e) {
        throw Error("cross-validation failed at repeat " + std::to_string(r) +
                    " fold " + std::to_string(f) + ": " + e.what());
      }
    }
  }

  const auto& acc = report.per_trial_accuracies;
  double sum = 0.0;
  for (double a : acc) sum += a;
  report.mean = sum / static_cast<double>(acc.size());
  double ss = 0.0;
  for (double a : acc) ss += (a - report.mean) * (a - report.mean);
  report.std_dev = acc.size() > 1
                       ? std::sqrt(ss / static_cast<double>(acc.size() - 1))
                       : 0.0;
  report.config = {k, repeats, seed, describe(spec)};
  return report;
}

namespace detail {

double paired_t_statistic(const std::vector<double>& a,
                          const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error("paired test needs equal lengths, got " +
                std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  if (a.size() < 2) throw Error("paired test needs at least 2 observations");

  const double n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd == 0.0) {
    if (mean == 0.0) return 0.0;
    return mean > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  }
  return mean / (sd / std::sqrt(n));
}

}  // namespace detail

ComparisonVerdict paired_t_test(const std::vector<double>& a,
                                const std::vector<double>& b) {
  const double t = detail::paired_t_statistic(a, b);

  ComparisonVerdict verdict;
  if (t == 0.0) {
    verdict.outcome = Outcome::tie;
    verdict.p_equal = 1.0;
    verdict.p_one_sided = 0.5;
    return verdict;
  }
  if (std::isinf(t)) {
    verdict.p_equal = 0.0;
    verdict.p_one_sided = t > 0.0 ? 0.0 : 1.0;
    verdict.outcome = t > 0.0 ? Outcome::win : Outcome::loss;
    return verdict;
  }

  const boost::math::students_t dist(static_cast<double>(a.size()) - 1.0);
  verdict.p_equal = 2.0 * boost::math::cdf(dist, -std::abs(t));
  verdict.p_one_sided = boost::math::cdf(dist, -t);
  if (verdict.p_equal > 0.05) {
    verdict.outcome = Outcome::tie;
  } else {
    verdict.outcome = verdict.p_one_sided < 0.05 ? Outcome::win : Outcome::loss;
  }
  return verdict;
}

static std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void export_heatmap(const WeightMatrix& wm,
                    const std::vector<std::string>& feature_names,
                    const std::string& path) {
  const Eigen::Index a = wm.W.rows();
  if (static_cast<Eigen::Index>(feature_names.size()) != a) {
    throw Error("heatmap needs " + std::to_string(a) + " feature names, got " +
                std::to_string(feature_names.size()));
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);

  for (const std::string& name : feature_names) out << ',' << csv_field(name);
  out << '\n';
  char buffer[64];
  for (Eigen::Index i = 0; i < a; ++i) {
    out << csv_field(feature_names[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < a; ++j) {
      std::snprintf(buffer, sizeof buffer, "%.6g", wm.W(i, j));
      out << ',' << buffer;
    }
    out << '\n';
  }
  if (!out.flush()) throw Error("failed writing " + path);
}

void write_report_json(const CVReport& report, const std::string& path) {
  nlohmann::json doc;
  doc["learner"] = report.config.learner;
  doc["k"] = report.config.k;
  doc["repeats"] = report.config.repeats;
  doc["seed"] = report.config.seed;
  doc["mean"] = report.mean;
  doc["std"] = report.std_dev;
  doc["accuracies"] = report.per_trial_accuracies;

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out.flush()) throw Error("failed writing " + path);
}

CVReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);

  nlohmann::json doc;
  try {
    in >> doc;
    CVReport report;
    report.config.learner = doc.at("learner").get<std::string>();
    report.config.k = doc.at("k").get<int>();
    report.config.repeats = doc.at("repeats").get<int>();
    report.config.seed = doc.at("seed").get<std::uint64_t>();
    report.mean = doc.at("mean").get<double>();
    report.std_dev = doc.at("std").get<double>();
    report.per_trial_accuracies =
        doc.at("accuracies").get<std::vector<double>>();
    if (report.per_trial_accuracies.empty())
      throw Error(path + ": report has no trial accuracies");
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": malformed report file (" + e.what() + ")");
  }
}

}  // namespace immigrate
