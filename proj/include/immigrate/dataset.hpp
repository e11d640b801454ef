#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace immigrate {

/// Error type used by the whole toolkit for contract violations and I/O
/// failures. Messages are one line and name the offending input.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A fully numeric dataset: N instances by A features plus integer class
/// labels. Labels are consecutive small integers (0..C-1). Instances never
/// change after construction; every operation returns a new Dataset.
struct Dataset {
  Eigen::MatrixXd features;               // N x A
  std::vector<int> labels;                 // length N
  std::vector<std::string> feature_names;  // length A

  Eigen::Index n_instances() const { return features.rows(); }
  Eigen::Index n_features() const { return features.cols(); }

  /// Number of distinct classes (max label + 1).
  int n_classes() const;
  /// Instance count per class id.
  std::vector<int> class_counts() const;
};

/// Checks the Dataset invariants (finite values, consistent sizes, unique
/// feature names) and throws Error on violation.
void validate(const Dataset& data);

/// Per-feature location/scale from a training set. A standard deviation of
/// exactly 0 flags a constant column; such columns standardize to 0.
struct StandardizationParams {
  Eigen::VectorXd means;
  Eigen::VectorXd standard_deviations;

  bool constant(Eigen::Index a) const { return standard_deviations[a] == 0.0; }
};

/// Assignment of each instance to one of k cross-validation folds.
struct FoldAssignment {
  std::vector<int> fold_index;  // length N, values in [0, k)
  int k = 0;

  std::vector<int> test_indices(int fold) const;
  std::vector<int> train_indices(int fold) const;
};

/// The label column of a CSV file, by header name or 0-based position.
using LabelColumn = std::variant<std::string, int>;

/// Loads an RFC-4180-style CSV (header row, '.' decimal separator, quoted
/// fields allowed). Labels are re-encoded as consecutive integers in order
/// of first appearance; feature column order is preserved.
Dataset load_csv(const std::string& path, const LabelColumn& label_column);

/// A CSV file read without designating a label column: the header plus one
/// numeric column per header entry. Lets callers pick columns by name.
struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;  // rows x columns.size()
};

/// Loads a CSV as a plain numeric table. Fields that do not parse as doubles
/// become NaN, so callers that select a subset of columns can leave (say) a
/// textual label column untouched; they must check the columns they use.
CsvTable load_csv_table(const std::string& path);

/// Writes the dataset back out as CSV with the label in the last column.
void write_csv(const Dataset& data, const std::string& path,
               const std::string& label_name = "label");

/// Centers and scales every feature to sample mean 0 and sample standard
/// deviation 1 (denominator N-1). Constant columns map to all zeros and are
/// flagged in the returned params rather than treated as an error.
std::pair<Dataset, StandardizationParams> standardize(const Dataset& data);

/// Applies previously fitted params: (x - mean) / sd per column, constant
/// columns to 0. Used to transform held-out data with training-fold
/// statistics.
Dataset apply_standardization(const Dataset& data,
                              const StandardizationParams& params);

/// Keeps only the rows of the two most populous classes (ties broken toward
/// the smaller label id) and re-encodes the surviving labels as 0/1 in order
/// of first appearance.
Dataset reduce_to_top_two_classes(const Dataset& data);

/// Stratified k-fold assignment, deterministic per seed. Per-class fold
/// counts differ by at most one and every fold is non-empty.
FoldAssignment stratified_kfold(const Dataset& data, int k, std::uint64_t seed);

/// Two-class 2-D Gaussian mixture with an interacting signal pair plus
/// wide-covariance noise clusters. Class 0 draws its signal from
/// N((4,2), [[1,.5],[.5,1]]) and its noise from N((8,-2), [[8,4],[4,8]]);
/// class 1 mirrors with means (6,0) and (2,4). The noise count is
/// round(noise_fraction * n_per_class); the remainder is signal.
Dataset generate_synthetic(int n_per_class, double noise_fraction,
                           std::uint64_t seed);

/// New dataset holding the given rows (in the given order).
Dataset subset(const Dataset& data, const std::vector<int>& rows);

/// New dataset holding the given feature columns (ascending order expected).
Dataset select_features(const Dataset& data, const std::vector<int>& columns);

}  // namespace immigrate
