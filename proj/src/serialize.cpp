#include "immigrate/serialize.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace immigrate {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const json& entry : j) v[i++] = entry.get<double>();
  return v;
}

json matrix_rows_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_rows_from_json(const json& j, const std::string& what) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) throw Error(what + " is empty");
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(what + " row " + std::to_string(i) + " has " +
                  std::to_string(row.size()) + " values, expected " +
                  std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

json immigrate_to_json(const ImmigrateModel& model) {
  json out;
  out["sigma"] = model.sigma;
  out["feature_names"] = model.training_data.feature_names;
  json w = json::array();
  for (Eigen::Index i = 0; i < model.weights.W.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.weights.W.cols(); ++j) {
      w.push_back(model.weights.W(i, j));
    }
  }
  out["W"] = std::move(w);
  out["training_features"] = matrix_rows_to_json(model.training_data.features);
  out["training_labels"] = model.training_data.labels;
  out["class_ids"] = model.class_ids;
  return out;
}

ImmigrateModel immigrate_from_json(const json& j) {
  ImmigrateModel model;
  model.sigma = j.at("sigma").get<double>();
  model.training_data.feature_names =
      j.at("feature_names").get<std::vector<std::string>>();
  model.training_data.features =
      matrix_rows_from_json(j.at("training_features"), "training_features");
  model.training_data.labels = j.at("training_labels").get<std::vector<int>>();
  model.class_ids = j.at("class_ids").get<std::vector<int>>();

  const Eigen::Index a = model.training_data.features.cols();
  const json& w = j.at("W");
  if (static_cast<Eigen::Index>(w.size()) != a * a) {
    throw Error("W has " + std::to_string(w.size()) + " entries, expected " +
                std::to_string(a * a));
  }
  model.weights.W.resize(a, a);
  for (Eigen::Index i = 0; i < a; ++i) {
    for (Eigen::Index c = 0; c < a; ++c) {
      model.weights.W(i, c) = w[static_cast<std::size_t>(i * a + c)].get<double>();
    }
  }
  if (model.training_data.labels.size() !=
      static_cast<std::size_t>(model.training_data.features.rows())) {
    throw Error("training_labels length does not match training_features");
  }
  return model;
}

json boosted_to_json(const BoostedModel& model) {
  json out;
  json learners = json::array();
  for (const ImmigrateModel& learner : model.learners) {
    learners.push_back(immigrate_to_json(learner));
  }
  out["learners"] = std::move(learners);
  out["votes"] = model.votes;
  out["class_ids"] = model.class_ids;
  return out;
}

BoostedModel boosted_from_json(const json& j) {
  BoostedModel model;
  for (const json& learner : j.at("learners")) {
    model.learners.push_back(immigrate_from_json(learner));
  }
  model.votes = j.at("votes").get<std::vector<double>>();
  model.class_ids = j.at("class_ids").get<std::vector<int>>();
  if (model.votes.size() != model.learners.size()) {
    throw Error("votes length does not match learner count");
  }
  if (model.learners.empty()) throw Error("boosted model has no learners");
  return model;
}

json screen_to_json(const ScreenResult& screen) {
  json out;
  out["kept_features"] = screen.kept_features;
  out["diag_weights"] = vector_to_json(screen.diag_weights);
  out["feature_names"] = screen.feature_names;
  return out;
}

ScreenResult screen_from_json(const json& j) {
  ScreenResult screen;
  screen.kept_features = j.at("kept_features").get<std::vector<int>>();
  screen.diag_weights = vector_from_json(j.at("diag_weights"));
  screen.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  if (screen.kept_features.empty()) throw Error("screen keeps no features");
  return screen;
}

json standardization_to_json(const std::optional<StandardizationParams>& params) {
  if (!params) return nullptr;
  json out;
  out["means"] = vector_to_json(params->means);
  out["standard_deviations"] = vector_to_json(params->standard_deviations);
  return out;
}

std::optional<StandardizationParams> standardization_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  StandardizationParams params;
  params.means = vector_from_json(j.at("means"));
  params.standard_deviations = vector_from_json(j.at("standard_deviations"));
  if (params.means.size() != params.standard_deviations.size()) {
    throw Error("standardization_params sizes disagree");
  }
  return params;
}

Eigen::MatrixXd standardize_queries(const ModelBundle& bundle,
                                    const Eigen::MatrixXd& queries) {
  if (!bundle.standardization) return queries;
  const StandardizationParams& p = *bundle.standardization;
  if (queries.cols() != p.means.size()) {
    throw Error("query has " + std::to_string(queries.cols()) +
                " features, model expects " + std::to_string(p.means.size()));
  }
  Eigen::MatrixXd out(queries.rows(), queries.cols());
  for (Eigen::Index a = 0; a < queries.cols(); ++a) {
    if (p.constant(a)) {
      out.col(a).setZero();
    } else {
      out.col(a) =
          (queries.col(a).array() - p.means[a]) / p.standard_deviations[a];
    }
  }
  return out;
}

}  // namespace

void save_model(const ModelBundle& bundle, const std::string& path) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["standardization_params"] = standardization_to_json(bundle.standardization);

  if (const auto* m = std::get_if<ImmigrateModel>(&bundle.model)) {
    doc["kind"] = "immigrate";
    doc.update(immigrate_to_json(*m));
  } else if (const auto* b = std::get_if<BoostedModel>(&bundle.model)) {
    doc["kind"] = "bim";
    doc.update(boosted_to_json(*b));
  } else if (const auto* s = std::get_if<ScreenedModel>(&bundle.model)) {
    doc["kind"] = "im4e-immigrate";
    doc["screen"] = screen_to_json(s->screen);
    doc["model"] = immigrate_to_json(s->model);
  } else {
    const auto& sb = std::get<ScreenedBoostedModel>(bundle.model);
    doc["kind"] = "b4g";
    doc["screen"] = screen_to_json(sb.screen);
    doc["model"] = boosted_to_json(sb.model);
  }

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(1) << '\n';
  if (!out.flush()) throw Error("failed writing " + path);
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("cannot parse " + path + ": " + e.what());
  }

  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw Error("unsupported format_version " + std::to_string(version));
    }

    ModelBundle bundle;
    bundle.standardization =
        standardization_from_json(doc.at("standardization_params"));

    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "immigrate") {
      bundle.model = immigrate_from_json(doc);
    } else if (kind == "bim") {
      bundle.model = boosted_from_json(doc);
    } else if (kind == "im4e-immigrate") {
      ScreenedModel sm;
      sm.screen = screen_from_json(doc.at("screen"));
      sm.model = immigrate_from_json(doc.at("model"));
      bundle.model = std::move(sm);
    } else if (kind == "b4g") {
      ScreenedBoostedModel sbm;
      sbm.screen = screen_from_json(doc.at("screen"));
      sbm.model = boosted_from_json(doc.at("model"));
      bundle.model = std::move(sbm);
    } else {
      throw Error("unknown model kind \"" + kind + "\"");
    }
    return bundle;
  } catch (const json::exception& e) {
    throw Error("malformed model file " + path + ": " + e.what());
  }
}

std::vector<int> predict_bundle(const ModelBundle& bundle,
                                const Eigen::MatrixXd& queries) {
  const Eigen::MatrixXd prepared = standardize_queries(bundle, queries);
  if (const auto* m = std::get_if<ImmigrateModel>(&bundle.model)) {
    return predict(*m, prepared);
  }
  if (const auto* b = std::get_if<BoostedModel>(&bundle.model)) {
    return predict_bim(*b, prepared);
  }
  if (const auto* s = std::get_if<ScreenedModel>(&bundle.model)) {
    return predict(*s, prepared);
  }
  return predict(std::get<ScreenedBoostedModel>(bundle.model), prepared);
}

int predict_bundle(const ModelBundle& bundle, const Eigen::RowVectorXd& x) {
  const Eigen::MatrixXd queries = x;
  return predict_bundle(bundle, queries).front();
}

const std::vector<std::string>& bundle_feature_names(const ModelBundle& bundle) {
  if (const auto* m = std::get_if<ImmigrateModel>(&bundle.model)) {
    return m->training_data.feature_names;
  }
  if (const auto* b = std::get_if<BoostedModel>(&bundle.model)) {
    return b->learners.front().training_data.feature_names;
  }
  if (const auto* s = std::get_if<ScreenedModel>(&bundle.model)) {
    return s->screen.feature_names;
  }
  return std::get<ScreenedBoostedModel>(bundle.model).screen.feature_names;
}

}  // namespace immigrate
