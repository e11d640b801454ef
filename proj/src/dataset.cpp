#include "immigrate/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "immigrate/rng.hpp"

namespace immigrate {

int Dataset::n_classes() const {
  int max_label = -1;
  for (int y : labels) max_label = std::max(max_label, y);
  return max_label + 1;
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(n_classes(), 0);
  for (int y : labels) ++counts[y];
  return counts;
}

void validate(const Dataset& data) {
  const auto n = data.features.rows();
  const auto a = data.features.cols();
  if (n < 2) throw Error("dataset: need at least 2 instances, got " + std::to_string(n));
  if (a < 1) throw Error("dataset: need at least 1 feature");
  if (static_cast<Eigen::Index>(data.labels.size()) != n)
    throw Error("dataset: label count " + std::to_string(data.labels.size()) +
                " does not match instance count " + std::to_string(n));
  if (static_cast<Eigen::Index>(data.feature_names.size()) != a)
    throw Error("dataset: feature name count does not match feature count");
  if (!data.features.allFinite()) throw Error("dataset: non-finite feature value");
  for (int y : data.labels)
    if (y < 0) throw Error("dataset: negative class label");
  std::set<std::string> seen(data.feature_names.begin(), data.feature_names.end());
  if (seen.size() != data.feature_names.size())
    throw Error("dataset: duplicate feature names");
}

std::vector<int> FoldAssignment::test_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_index.size(); ++i)
    if (fold_index[i] == fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FoldAssignment::train_indices(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_index.size(); ++i)
    if (fold_index[i] != fold) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

// Splits one CSV record, honoring double-quoted fields with embedded commas,
// quotes ("") and newlines already joined by the caller.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && begin != end;
}

}  // namespace

Dataset load_csv(const std::string& path, const LabelColumn& label_column) {
  std::ifstream in(path);
  if (!in) throw Error("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw Error("load_csv: '" + path + "' is empty");
  const std::vector<std::string> header = split_record(line);

  int label_idx = -1;
  if (std::holds_alternative<std::string>(label_column)) {
    const auto& name = std::get<std::string>(label_column);
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) label_idx = static_cast<int>(i);
    if (label_idx < 0)
      throw Error("load_csv: label column '" + name + "' not found in header");
  } else {
    label_idx = std::get<int>(label_column);
    if (label_idx < 0 || label_idx >= static_cast<int>(header.size()))
      throw Error("load_csv: label column index " + std::to_string(label_idx) +
                  " out of range (file has " + std::to_string(header.size()) +
                  " columns)");
  }

  Dataset data;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (static_cast<int>(i) != label_idx) data.feature_names.push_back(header[i]);

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_record(line);
    if (fields.size() != header.size())
      throw Error("load_csv: row " + std::to_string(line_no) + " has " +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) == label_idx) {
        raw_labels.push_back(fields[i]);
        continue;
      }
      double v = 0;
      if (!parse_double(fields[i], v))
        throw Error("load_csv: cannot parse '" + fields[i] + "' at row " +
                    std::to_string(line_no) + ", column '" + header[i] + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2)
    throw Error("load_csv: '" + path + "' has fewer than 2 data rows");

  // Encode labels as consecutive integers in order of first appearance.
  std::vector<std::string> label_order;
  for (const auto& s : raw_labels) {
    if (std::find(label_order.begin(), label_order.end(), s) == label_order.end())
      label_order.push_back(s);
  }
  for (const auto& s : raw_labels) {
    const auto it = std::find(label_order.begin(), label_order.end(), s);
    data.labels.push_back(static_cast<int>(it - label_order.begin()));
  }

  data.features.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(header.size()) - 1);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];

  validate(data);
  return data;
}

CsvTable load_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_csv_table: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw Error("load_csv_table: '" + path + "' is empty");

  CsvTable table;
  table.columns = split_record(line);

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_record(line);
    if (fields.size() != table.columns.size())
      throw Error("load_csv_table: row " + std::to_string(line_no) + " has " +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(table.columns.size()));
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (!parse_double(fields[i], row[i]))
        row[i] = std::numeric_limits<double>::quiet_NaN();
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("load_csv_table: '" + path + "' has no data rows");

  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
  return table;
}

void write_csv(const Dataset& data, const std::string& path,
               const std::string& label_name) {
  std::ofstream out(path);
  if (!out) throw Error("write_csv: cannot open '" + path + "' for writing");
  for (const auto& name : data.feature_names) out << name << ',';
  out << label_name << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < data.n_instances(); ++i) {
    for (Eigen::Index a = 0; a < data.n_features(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", data.features(i, a));
      out << buf << ',';
    }
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!out) throw Error("write_csv: failed writing '" + path + "'");
}

std::pair<Dataset, StandardizationParams> standardize(const Dataset& data) {
  const auto n = data.n_instances();
  const auto a = data.n_features();
  StandardizationParams params;
  params.means.resize(a);
  params.standard_deviations.resize(a);
  for (Eigen::Index c = 0; c < a; ++c) {
    const double mean = data.features.col(c).mean();
    const double ss = (data.features.col(c).array() - mean).square().sum();
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    params.means[c] = mean;
    params.standard_deviations[c] = sd > 0.0 ? sd : 0.0;
  }
  return {apply_standardization(data, params), params};
}

Dataset apply_standardization(const Dataset& data,
                              const StandardizationParams& params) {
  if (params.means.size() != data.n_features())
    throw Error("apply_standardization: params have " +
                std::to_string(params.means.size()) + " features, data has " +
                std::to_string(data.n_features()));
  Dataset out = data;
  for (Eigen::Index c = 0; c < data.n_features(); ++c) {
    if (params.constant(c)) {
      out.features.col(c).setZero();
    } else {
      out.features.col(c) =
          (data.features.col(c).array() - params.means[c]) /
          params.standard_deviations[c];
    }
  }
  return out;
}

Dataset reduce_to_top_two_classes(const Dataset& data) {
  const auto counts = data.class_counts();
  if (counts.size() < 2)
    throw Error("reduce_to_top_two_classes: need at least 2 classes");
  // Two largest counts, ties toward the smaller label id.
  int first = 0, second = -1;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(first)]) {
      second = first;
      first = static_cast<int>(c);
    } else if (second < 0 || counts[c] > counts[static_cast<std::size_t>(second)]) {
      second = static_cast<int>(c);
    }
  }
  std::vector<int> rows;
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    if (data.labels[i] == first || data.labels[i] == second)
      rows.push_back(static_cast<int>(i));
  Dataset out = subset(data, rows);
  // Re-encode as 0/1 in order of first appearance.
  std::vector<int> order;
  for (int& y : out.labels) {
    const auto it = std::find(order.begin(), order.end(), y);
    if (it == order.end()) {
      order.push_back(y);
      y = static_cast<int>(order.size()) - 1;
    } else {
      y = static_cast<int>(it - order.begin());
    }
  }
  return out;
}

FoldAssignment stratified_kfold(const Dataset& data, int k, std::uint64_t seed) {
  const auto n = data.n_instances();
  if (k < 2) throw Error("stratified_kfold: k must be at least 2");
  if (k > n)
    throw Error("stratified_kfold: k=" + std::to_string(k) + " exceeds N=" +
                std::to_string(n));

  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(data.n_classes()));
  for (Eigen::Index i = 0; i < n; ++i)
    by_class[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])]
        .push_back(static_cast<int>(i));

  FoldAssignment fa;
  fa.k = k;
  fa.fold_index.assign(static_cast<std::size_t>(n), 0);
  Rng rng(seed);
  // Deal each class round-robin; the cursor carries across classes so total
  // fold sizes stay balanced too.
  int cursor = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (int idx : members) {
      fa.fold_index[static_cast<std::size_t>(idx)] = cursor % k;
      ++cursor;
    }
  }
  return fa;
}

namespace {

// Draws from N(mean, cov) given the Cholesky factor of cov.
Eigen::Vector2d sample_gaussian(Rng& rng, const Eigen::Vector2d& mean,
                                const Eigen::Matrix2d& chol) {
  Eigen::Vector2d z(rng.normal(), rng.normal());
  return mean + chol * z;
}

}  // namespace

Dataset generate_synthetic(int n_per_class, double noise_fraction,
                           std::uint64_t seed) {
  if (n_per_class < 1) throw Error("generate_synthetic: n_per_class must be >= 1");
  if (noise_fraction < 0.0 || noise_fraction > 0.5)
    throw Error("generate_synthetic: noise_fraction must be in [0, 0.5]");

  const int n_noise =
      static_cast<int>(std::lround(noise_fraction * n_per_class));
  const int n_signal = n_per_class - n_noise;

  Eigen::Matrix2d signal_cov;
  signal_cov << 1.0, 0.5, 0.5, 1.0;
  Eigen::Matrix2d noise_cov;
  noise_cov << 8.0, 4.0, 4.0, 8.0;
  const Eigen::Matrix2d signal_chol = signal_cov.llt().matrixL();
  const Eigen::Matrix2d noise_chol = noise_cov.llt().matrixL();

  struct Component {
    Eigen::Vector2d mean;
    const Eigen::Matrix2d* chol;
    int count;
    int label;
  };
  const std::vector<Component> components = {
      {{4.0, 2.0}, &signal_chol, n_signal, 0},
      {{8.0, -2.0}, &noise_chol, n_noise, 0},
      {{6.0, 0.0}, &signal_chol, n_signal, 1},
      {{2.0, 4.0}, &noise_chol, n_noise, 1},
  };

  Dataset data;
  data.feature_names = {"f1", "f2"};
  data.features.resize(2 * n_per_class, 2);
  Rng rng(seed);
  Eigen::Index row = 0;
  for (const auto& comp : components) {
    for (int i = 0; i < comp.count; ++i) {
      data.features.row(row++) = sample_gaussian(rng, comp.mean, *comp.chol);
      data.labels.push_back(comp.label);
    }
  }
  return data;
}

Dataset subset(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.n_features());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

Dataset select_features(const Dataset& data, const std::vector<int>& columns) {
  Dataset out;
  out.labels = data.labels;
  out.features.resize(data.n_instances(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] < 0 || columns[c] >= data.n_features())
      throw Error("select_features: column " + std::to_string(columns[c]) +
                  " out of range");
    out.features.col(static_cast<Eigen::Index>(c)) = data.features.col(columns[c]);
    out.feature_names.push_back(
        data.feature_names[static_cast<std::size_t>(columns[c])]);
  }
  return out;
}

}  // namespace immigrate
