#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "immigrate/boosting.hpp"
#include "immigrate/core.hpp"
#include "immigrate/dataset.hpp"
#include "immigrate/eval.hpp"
#include "immigrate/highdim.hpp"
#include "immigrate/relief.hpp"
#include "immigrate/serialize.hpp"

namespace {

using immigrate::Dataset;
using immigrate::Error;
using immigrate::LearnerKind;
using immigrate::ModelBundle;

// Every flag any subcommand accepts; each subcommand binds its own subset.
struct RunConfig {
  std::string data_path;
  std::string label_column;
  std::string model_path;
  std::string out_path;
  std::string report_a;
  std::string report_b;
  LearnerKind learner = LearnerKind::immigrate;
  double sigma = 1.0;
  bool prune = false;
  bool tune = false;
  bool top_two = false;
  int k = 10;
  int repeats = 10;
  int rounds = 100;
  double sigma_max = 4.0;
  double sigma_min = 0.2;
  double screen_threshold = -1.0;
  int n_per_class = 0;
  double noise = 0.0;
  int jobs = 1;
  std::uint64_t seed = 42;
};

const std::map<std::string, LearnerKind>& learner_names() {
  static const std::map<std::string, LearnerKind> names = {
      {"relief", LearnerKind::relief},
      {"immigrate", LearnerKind::immigrate},
      {"bim", LearnerKind::bim},
      {"im4e-immigrate", LearnerKind::im4e_immigrate},
      {"b4g", LearnerKind::b4g},
  };
  return names;
}

immigrate::Hyperparameters hyperparameters(const RunConfig& cfg) {
  immigrate::Hyperparameters hp;
  hp.sigma = cfg.sigma;
  hp.prune_enabled = cfg.prune;
  hp.seed = cfg.seed;
  return hp;
}

immigrate::BimOptions boost_options(const RunConfig& cfg) {
  immigrate::BimOptions opt;
  opt.rounds = cfg.rounds;
  opt.sigma_max = cfg.sigma_max;
  opt.sigma_min = cfg.sigma_min;
  opt.seed = cfg.seed;
  return opt;
}

Dataset load_training_csv(const RunConfig& cfg) {
  Dataset data = immigrate::load_csv(cfg.data_path, cfg.label_column);
  if (cfg.top_two) data = immigrate::reduce_to_top_two_classes(data);
  return data;
}

double resolve_screen_threshold(const RunConfig& cfg, const Dataset& data) {
  return cfg.screen_threshold < 0.0
             ? 2.0 / static_cast<double>(data.n_features())
             : cfg.screen_threshold;
}

// Relief produces feature weights, not a classifier, so it persists as a
// diagonal weight matrix driven at near-zero temperature: prediction is then
// nearest-neighbor under the Relief-weighted squared distance.
immigrate::ImmigrateModel relief_model(const Dataset& data) {
  immigrate::ImmigrateModel model;
  model.weights.W = Eigen::MatrixXd(
      immigrate::relief_closed_form(data).w.asDiagonal());
  model.sigma = 1e-6;
  model.training_data = data;
  const std::set<int> distinct(data.labels.begin(), data.labels.end());
  model.class_ids.assign(distinct.begin(), distinct.end());
  return model;
}

int screened_feature_count(const ModelBundle& bundle) {
  if (const auto* m = std::get_if<immigrate::ScreenedModel>(&bundle.model))
    return static_cast<int>(m->screen.kept_features.size());
  if (const auto* m = std::get_if<immigrate::ScreenedBoostedModel>(&bundle.model))
    return static_cast<int>(m->screen.kept_features.size());
  return -1;
}

void cmd_train(const RunConfig& cfg) {
  if (cfg.tune && cfg.learner != LearnerKind::immigrate)
    throw Error("tuning is only supported for the immigrate learner");

  const Dataset raw = load_training_csv(cfg);
  const auto [data, params] = immigrate::standardize(raw);

  ModelBundle bundle;
  bundle.standardization = params;
  switch (cfg.learner) {
    case LearnerKind::relief:
      bundle.model = relief_model(data);
      break;
    case LearnerKind::immigrate: {
      immigrate::Hyperparameters hp = hyperparameters(cfg);
      if (cfg.tune) hp = immigrate::tune_sigma(data, hp, 3);
      bundle.model = immigrate::train(data, hp);
      break;
    }
    case LearnerKind::bim:
      bundle.model = immigrate::train_bim(data, boost_options(cfg));
      break;
    case LearnerKind::im4e_immigrate:
      bundle.model = immigrate::train_im4e_immigrate(
          data, hyperparameters(cfg), resolve_screen_threshold(cfg, data));
      break;
    case LearnerKind::b4g:
      bundle.model = immigrate::train_b4g(data, boost_options(cfg),
                                          resolve_screen_threshold(cfg, data));
      break;
    case LearnerKind::majority:
      throw Error("the majority baseline cannot be trained from the CLI");
  }

  const std::vector<int> predicted = predict_bundle(bundle, raw.features);
  int hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == raw.labels[i]) ++hits;
  std::printf("training accuracy: %.4f (%lld instances)\n",
              static_cast<double>(hits) / static_cast<double>(predicted.size()),
              static_cast<long long>(raw.n_instances()));
  if (const int kept = screened_feature_count(bundle); kept >= 0)
    std::printf("screened to %d of %lld features\n", kept,
                static_cast<long long>(raw.n_features()));

  if (!cfg.out_path.empty()) {
    immigrate::save_model(bundle, cfg.out_path);
    std::printf("model written to %s\n", cfg.out_path.c_str());
  }
}

void cmd_predict(const RunConfig& cfg) {
  const ModelBundle bundle = immigrate::load_model(cfg.model_path);
  const std::vector<std::string>& names = immigrate::bundle_feature_names(bundle);
  const immigrate::CsvTable table = immigrate::load_csv_table(cfg.data_path);

  Eigen::MatrixXd queries(table.values.rows(),
                          static_cast<Eigen::Index>(names.size()));
  for (std::size_t a = 0; a < names.size(); ++a) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), names[a]);
    if (it == table.columns.end())
      throw Error("predict: '" + cfg.data_path + "' has no column '" + names[a] +
                  "'");
    queries.col(static_cast<Eigen::Index>(a)) =
        table.values.col(it - table.columns.begin());
    if (!queries.col(static_cast<Eigen::Index>(a)).allFinite())
      throw Error("predict: column '" + names[a] + "' has a non-numeric value");
  }

  const std::vector<int> predicted = predict_bundle(bundle, queries);
  std::ofstream out(cfg.out_path);
  if (!out) throw Error("cannot write " + cfg.out_path);
  out << "prediction\n";
  for (int y : predicted) out << y << '\n';
  if (!out.flush()) throw Error("failed writing " + cfg.out_path);
  std::printf("%zu predictions written to %s\n", predicted.size(),
              cfg.out_path.c_str());
}

void cmd_cv(const RunConfig& cfg) {
  const Dataset data = load_training_csv(cfg);

  immigrate::LearnerSpec spec;
  spec.kind = cfg.learner;
  spec.hp = hyperparameters(cfg);
  spec.tune = cfg.tune;
  spec.boost = boost_options(cfg);
  spec.screen_threshold = cfg.screen_threshold;

  const immigrate::CVReport report =
      immigrate::cross_validate(data, spec, cfg.k, cfg.repeats, cfg.seed);
  std::printf("mean accuracy %.4f +/- %.4f over %zu trials [%s]\n", report.mean,
              report.std_dev, report.per_trial_accuracies.size(),
              report.config.learner.c_str());
  if (!cfg.out_path.empty()) {
    immigrate::write_report_json(report, cfg.out_path);
    std::printf("report written to %s\n", cfg.out_path.c_str());
  }
}

void cmd_synth(const RunConfig& cfg) {
  const Dataset data =
      immigrate::generate_synthetic(cfg.n_per_class, cfg.noise, cfg.seed);
  immigrate::write_csv(data, cfg.out_path, "class");
  std::printf("%lld rows written to %s\n",
              static_cast<long long>(data.n_instances()), cfg.out_path.c_str());
}

void cmd_compare(const RunConfig& cfg) {
  const immigrate::CVReport a = immigrate::read_report_json(cfg.report_a);
  const immigrate::CVReport b = immigrate::read_report_json(cfg.report_b);
  if (a.per_trial_accuracies.size() != b.per_trial_accuracies.size())
    throw Error("compare: reports have " +
                std::to_string(a.per_trial_accuracies.size()) + " and " +
                std::to_string(b.per_trial_accuracies.size()) +
                " trials; a paired test needs equal counts");

  const immigrate::ComparisonVerdict verdict =
      immigrate::paired_t_test(a.per_trial_accuracies, b.per_trial_accuracies);
  const char* outcome = verdict.outcome == immigrate::Outcome::win    ? "win"
                        : verdict.outcome == immigrate::Outcome::loss ? "loss"
                                                                      : "tie";
  std::printf("a: %s mean %.4f\n", a.config.learner.c_str(), a.mean);
  std::printf("b: %s mean %.4f\n", b.config.learner.c_str(), b.mean);
  std::printf("verdict: %s (p_equal=%.6g, p_one_sided=%.6g)\n", outcome,
              verdict.p_equal, verdict.p_one_sided);
}

void cmd_heatmap(const RunConfig& cfg) {
  const ModelBundle bundle = immigrate::load_model(cfg.model_path);
  if (const auto* m = std::get_if<immigrate::ImmigrateModel>(&bundle.model)) {
    immigrate::export_heatmap(m->weights, m->training_data.feature_names,
                              cfg.out_path);
  } else if (const auto* s = std::get_if<immigrate::ScreenedModel>(&bundle.model)) {
    immigrate::export_heatmap(s->model.weights,
                              s->model.training_data.feature_names,
                              cfg.out_path);
  } else {
    throw Error("heatmap needs a single weight matrix; boosted ensembles are "
                "not supported");
  }
  std::printf("heatmap written to %s\n", cfg.out_path.c_str());
}

int run(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"immigrate: hypothesis-margin feature selection and classification"};
  app.set_version_flag("--version", "0.1.0");
  app.require_subcommand(1);

  const auto learner_transform =
      CLI::CheckedTransformer(learner_names(), CLI::ignore_case);
  const auto add_learner_flags = [&](CLI::App* cmd) {
    cmd->add_option("--learner", cfg.learner,
                    "relief|immigrate|bim|im4e-immigrate|b4g")
        ->transform(learner_transform)
        ->capture_default_str();
    cmd->add_option("--sigma", cfg.sigma, "softmax temperature")
        ->capture_default_str();
    cmd->add_flag("--prune", cfg.prune, "zero small entries of W after training");
    cmd->add_flag("--tune", cfg.tune,
                  "pick sigma and pruning by inner 3-fold CV (immigrate only)");
    cmd->add_option("--T", cfg.rounds, "boosting rounds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--sigma-max", cfg.sigma_max, "boosting start temperature")
        ->capture_default_str();
    cmd->add_option("--sigma-min", cfg.sigma_min, "boosting end temperature")
        ->capture_default_str();
    cmd->add_option("--screen-threshold", cfg.screen_threshold,
                    "prescreen weight cutoff; default 2/A");
    cmd->add_flag("--top-two", cfg.top_two,
                  "keep only the two most populous classes");
    cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  };

  CLI::App* train = app.add_subcommand(
      "train", "fit a model on a full CSV, print training accuracy, save it");
  train->add_option("--data", cfg.data_path, "training CSV")->required();
  train->add_option("--label", cfg.label_column, "label column name")->required();
  add_learner_flags(train);
  train->add_option("--out", cfg.out_path, "model JSON path");
  train->callback([&] { cmd_train(cfg); });

  CLI::App* predict = app.add_subcommand(
      "predict", "apply a saved model to a CSV; columns are matched by name");
  predict->add_option("--model", cfg.model_path, "model JSON path")->required();
  predict->add_option("--data", cfg.data_path, "query CSV")->required();
  predict->add_option("--out", cfg.out_path, "predictions CSV path")->required();
  predict->callback([&] { cmd_predict(cfg); });

  CLI::App* cv = app.add_subcommand(
      "cv", "repeated stratified k-fold cross-validation with a JSON report");
  cv->add_option("--data", cfg.data_path, "dataset CSV")->required();
  cv->add_option("--label", cfg.label_column, "label column name")->required();
  add_learner_flags(cv);
  cv->add_option("--k", cfg.k, "folds")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  cv->add_option("--repeats", cfg.repeats, "repetitions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cv->add_option("--jobs", cfg.jobs,
                 "cap on evaluation workers (this build runs one)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cv->add_option("--out", cfg.out_path, "report JSON path");
  cv->callback([&] { cmd_cv(cfg); });

  CLI::App* synth = app.add_subcommand(
      "synth", "write a two-class Gaussian mixture with an interacting pair");
  synth->add_option("--n", cfg.n_per_class, "instances per class")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--noise", cfg.noise, "noise-cluster fraction")
      ->capture_default_str();
  synth->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  synth->add_option("--out", cfg.out_path, "output CSV path")->required();
  synth->callback([&] { cmd_synth(cfg); });

  CLI::App* compare = app.add_subcommand(
      "compare", "paired t-test verdict between two cv reports");
  compare->add_option("--a", cfg.report_a, "first report JSON")->required();
  compare->add_option("--b", cfg.report_b, "second report JSON")->required();
  compare->callback([&] { cmd_compare(cfg); });

  CLI::App* heatmap = app.add_subcommand(
      "heatmap", "export a saved model's weight matrix as CSV");
  heatmap->add_option("--model", cfg.model_path, "model JSON path")->required();
  heatmap->add_option("--out", cfg.out_path, "heatmap CSV path")->required();
  heatmap->callback([&] { cmd_heatmap(cfg); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
