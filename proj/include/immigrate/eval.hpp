#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "immigrate/boosting.hpp"
#include "immigrate/core.hpp"
#include "immigrate/highdim.hpp"

namespace immigrate {

enum class LearnerKind {
  majority,  // constant majority-class baseline
  relief,
  immigrate,
  bim,
  im4e_immigrate,
  b4g,
};

// Everything needed to train one classifier inside a cross-validation cell.
// The seed fields inside hp/boost are overwritten per cell.
struct LearnerSpec {
  LearnerKind kind = LearnerKind::immigrate;
  Hyperparameters hp;
  // Pick sigma and pruning by nested 3-fold cross-validation on the training
  // portion. Only meaningful for the immigrate kind.
  bool tune = false;
  BimOptions boost;
  double screen_threshold = -1.0;  // negative resolves to 2/A
};

std::string describe(const LearnerSpec& spec);

struct CVConfig {
  int k = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::string learner;
};

struct CVReport {
  std::vector<double> per_trial_accuracies;  // k * repeats entries, (r, f) order
  double mean = 0.0;
  double std_dev = 0.0;
  CVConfig config;
};

enum class Outcome { win, tie, loss };

struct ComparisonVerdict {
  Outcome outcome = Outcome::tie;
  double p_equal = 1.0;
  double p_one_sided = 0.5;
};

// Trains on the train rows (standardized in place, with the held-out rows
// mapped through the same fit) and returns held-out accuracy.
double evaluate_split(const Dataset& data, const LearnerSpec& spec,
                      const std::vector<int>& train_rows,
                      const std::vector<int>& test_rows, std::uint64_t seed);

// repeats x k stratified cross-validation; deterministic given seed. Fold
// r uses stratification seed mix_seed(seed, r); cell (r, f) trains with seed
// mix_seed(mix_seed(seed, r), f).
CVReport cross_validate(const Dataset& data, const LearnerSpec& spec, int k,
                        int repeats, std::uint64_t seed);

// Two-stage paired Student's t-test at the 0.05 level: a two-sided test for
// equal means first (p > 0.05 means tie), then a one-sided test of
// mean(a - b) > 0 deciding win versus loss.
ComparisonVerdict paired_t_test(const std::vector<double>& a,
                                const std::vector<double>& b);

// CSV matrix of W with feature names on both margins, 6 significant digits.
void export_heatmap(const WeightMatrix& wm,
                    const std::vector<std::string>& feature_names,
                    const std::string& path);

// JSON file with the config, summary statistics, and all trial accuracies.
void write_report_json(const CVReport& report, const std::string& path);

// Reads a file produced by write_report_json back; the inverse operation.
CVReport read_report_json(const std::string& path);

namespace detail {

double paired_t_statistic(const std::vector<double>& a,
                          const std::vector<double>& b);

}  // namespace detail

}  // namespace immigrate
