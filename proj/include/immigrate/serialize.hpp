#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "immigrate/highdim.hpp"

namespace immigrate {

// A trained classifier plus the feature standardization it expects queries
// to pass through. Models are trained on standardized folds, so the fitted
// location/scale travels with the model file.
struct ModelBundle {
  std::variant<ImmigrateModel, BoostedModel, ScreenedModel, ScreenedBoostedModel>
      model;
  std::optional<StandardizationParams> standardization;
};

// Writes the bundle as versioned JSON. Numbers round-trip exactly.
void save_model(const ModelBundle& bundle, const std::string& path);

ModelBundle load_model(const std::string& path);

// Applies the stored standardization (when present) and dispatches to the
// right predictor.
int predict_bundle(const ModelBundle& bundle, const Eigen::RowVectorXd& x);
std::vector<int> predict_bundle(const ModelBundle& bundle,
                                const Eigen::MatrixXd& queries);

// Feature names the bundle's queries must supply, in order.
const std::vector<std::string>& bundle_feature_names(const ModelBundle& bundle);

}  // namespace immigrate
