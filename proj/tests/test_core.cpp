#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "immigrate/core.hpp"
#include "immigrate/dataset.hpp"
#include "immigrate/pair_table.hpp"
#include "immigrate/rng.hpp"

using namespace immigrate;

namespace {

Dataset make(const std::vector<std::vector<double>>& rows,
             const std::vector<int>& labels) {
  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  d.labels = labels;
  for (std::size_t j = 0; j < rows[0].size(); ++j)
    d.feature_names.push_back("f" + std::to_string(j));
  return d;
}

Dataset random_binary(Rng& rng, int n, int a, double gap = 1.0) {
  Dataset d;
  d.features.resize(n, a);
  for (int i = 0; i < n; ++i) {
    d.labels.push_back(i % 2);
    for (int j = 0; j < a; ++j)
      d.features(i, j) = rng.normal() + gap * (i % 2);
  }
  for (int j = 0; j < a; ++j) d.feature_names.push_back("f" + std::to_string(j));
  return d;
}

// Independent cost evaluation: explicit loops, no shared code with the
// library's pair table.
double slow_cost(const Dataset& d, const Eigen::MatrixXd& w,
                 const NeighborWeights& nw, double sigma) {
  auto q = [&](int i, int j) {
    double total = 0;
    for (int a = 0; a < d.n_features(); ++a)
      for (int b = 0; b < d.n_features(); ++b)
        total += std::abs(d.features(i, a) - d.features(j, a)) * w(a, b) *
                 std::abs(d.features(i, b) - d.features(j, b));
    return total;
  };
  double margin = 0, entropy_gap = 0;
  for (int n = 0; n < d.n_instances(); ++n) {
    for (int j = 0; j < d.n_instances(); ++j) {
      if (j == n) continue;
      if (d.labels[static_cast<std::size_t>(j)] ==
          d.labels[static_cast<std::size_t>(n)]) {
        margin += nw.alpha(n, j) * q(n, j);
        if (nw.alpha(n, j) > 0)
          entropy_gap += nw.alpha(n, j) * std::log(nw.alpha(n, j));
      } else {
        margin -= nw.beta(n, j) * q(n, j);
        if (nw.beta(n, j) > 0)
          entropy_gap -= nw.beta(n, j) * std::log(nw.beta(n, j));
      }
    }
  }
  return margin + sigma * entropy_gap;
}

// Random feasible weight matrix: orthonormal basis from a QR factorization
// combined with a random non-negative spectrum on the unit sphere.
Eigen::MatrixXd random_feasible(Eigen::Index a, Rng& rng) {
  Eigen::MatrixXd g(a, a);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < a; ++j) g(i, j) = rng.normal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd basis = qr.householderQ();
  Eigen::VectorXd eta(a);
  for (Eigen::Index i = 0; i < a; ++i) eta[i] = std::abs(rng.normal());
  eta /= eta.norm();
  return basis * eta.asDiagonal() * basis.transpose();
}

void check_weight_invariants(const WeightMatrix& wm) {
  CHECK(wm.asymmetry() <= 1e-12);
  CHECK(std::abs(wm.frobenius() - 1.0) <= 1e-9);
  CHECK(wm.min_eigenvalue() >= -1e-9);
}

}  // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("quadratic_manhattan matches hand computations") {
  Rng rng(1);
  const WeightMatrix wm = random_weights(3, rng);
  Eigen::VectorXd x(3);
  x << 0.3, -1.2, 4.0;
  CHECK(quadratic_manhattan(x, x, wm) == 0.0);

  const WeightMatrix id4 = uniform_diagonal_weights(4);
  Eigen::VectorXd zero4 = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd ones4 = Eigen::VectorXd::Ones(4);
  CHECK(quadratic_manhattan(zero4, ones4, id4) == doctest::Approx(2.0));

  WeightMatrix flat;
  flat.W.resize(2, 2);
  flat.W << 0.5, 0.5, 0.5, 0.5;
  REQUIRE(flat.frobenius() == doctest::Approx(1.0));
  Eigen::VectorXd a(2), b(2);
  a << 1, -1;
  b << 0, 1;  // |a - b| = (1, 2)
  // 0.5*1*1 + 0.5*1*2 + 0.5*2*1 + 0.5*2*2
  CHECK(quadratic_manhattan(a, b, flat) == doctest::Approx(4.5));
  CHECK(quadratic_manhattan(a, b, flat) == quadratic_manhattan(b, a, flat));

  Eigen::VectorXd short_vec(1);
  CHECK_THROWS_AS(quadratic_manhattan(short_vec, b, flat), Error);
}

TEST_CASE("weight matrix constructors satisfy the feasibility constraints") {
  const WeightMatrix id = uniform_diagonal_weights(5);
  CHECK(id.frobenius() == doctest::Approx(1.0));
  CHECK(id.W(0, 0) == doctest::Approx(1.0 / std::sqrt(5.0)));
  CHECK(id.W(0, 1) == 0.0);

  Rng rng(9);
  const WeightMatrix r = random_weights(4, rng);
  CHECK(r.asymmetry() == 0.0);
  CHECK(r.min_entry() >= 0.0);
  CHECK(std::abs(r.frobenius() - 1.0) <= 1e-12);

  Rng again(9);
  CHECK(random_weights(4, again).W == r.W);
}

TEST_CASE("update_neighbor_weights reproduces analytic softmax values") {
  const double sigma = 1.3;

  // Instance 0's hits sit at measurement 0 (a duplicate) and sigma*ln 2.
  const double far = std::sqrt(sigma * std::log(2.0));
  const Dataset d = make({{0}, {0}, {far}, {10}, {11}}, {0, 0, 0, 1, 1});
  WeightMatrix unit;
  unit.W = Eigen::MatrixXd::Ones(1, 1);
  const NeighborWeights nw = update_neighbor_weights(d, unit, sigma);
  CHECK(nw.alpha(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(nw.alpha(0, 2) == doctest::Approx(1.0 / 3.0));

  const Dataset lonely = make({{0}, {1}, {5}}, {0, 0, 1});
  CHECK_THROWS_WITH_AS(update_neighbor_weights(lonely, unit, sigma),
                       doctest::Contains("instance 2"), Error);
}

TEST_CASE("update_neighbor_weights handles singleton and symmetric hit sets") {
  // Two per class: each instance has exactly one hit.
  const Dataset two = make({{0}, {1}, {5}, {7}}, {0, 0, 1, 1});
  WeightMatrix unit;
  unit.W = Eigen::MatrixXd::Ones(1, 1);
  const NeighborWeights nw = update_neighbor_weights(two, unit, 1.0);
  CHECK(nw.alpha(0, 1) == 1.0);
  CHECK(nw.alpha(2, 3) == 1.0);

  // Equidistant hits split evenly.
  const Dataset sym = make({{0}, {1}, {-1}, {9}, {8}}, {0, 0, 0, 1, 1});
  const NeighborWeights nw2 = update_neighbor_weights(sym, unit, 2.0);
  CHECK(nw2.alpha(0, 1) == doctest::Approx(0.5));
  CHECK(nw2.alpha(0, 2) == doctest::Approx(0.5));

  CHECK_THROWS_AS(update_neighbor_weights(two, unit, 0.0), Error);
  CHECK_THROWS_AS(update_neighbor_weights(two, unit, -1.0), Error);
}

TEST_CASE("neighbor weights are simplex-valid on random data") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = random_binary(rng, 6 + static_cast<int>(rng.below(20)),
                                    1 + static_cast<int>(rng.below(5)));
    Rng wrng(trial);
    const WeightMatrix wm = random_weights(d.n_features(), wrng);
    const double sigma = 0.05 + 4 * rng.uniform();
    const NeighborWeights nw = update_neighbor_weights(d, wm, sigma);
    for (int n = 0; n < d.n_instances(); ++n) {
      CHECK(std::abs(nw.alpha.row(n).sum() - 1.0) <= 1e-12);
      CHECK(std::abs(nw.beta.row(n).sum() - 1.0) <= 1e-12);
      CHECK(nw.alpha.row(n).minCoeff() >= 0.0);
      CHECK(nw.beta.row(n).minCoeff() >= 0.0);
      CHECK(nw.alpha.row(n).maxCoeff() <= 1.0);
      CHECK(nw.beta.row(n).maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("softmax is invariant to shifting one instance's measurements") {
  // Build pair measurements by hand for 5 instances, then shift every
  // hit-pair value of instance 0 by a constant.
  const std::vector<int> labels = {0, 0, 0, 1, 1};
  const Eigen::Index n = 5;
  Eigen::VectorXd q(PairTable::pair_count(n));
  Rng rng(3);
  for (Eigen::Index p = 0; p < q.size(); ++p) q[p] = 3.0 * rng.uniform();

  Eigen::VectorXd shifted = q;
  shifted[PairTable::index(0, 1, n)] += 7.5;
  shifted[PairTable::index(0, 2, n)] += 7.5;

  const NeighborWeights base = detail::neighbors_from_measurements(q, labels, 0.8);
  const NeighborWeights moved =
      detail::neighbors_from_measurements(shifted, labels, 0.8);
  CHECK((base.alpha.row(0) - moved.alpha.row(0)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(base.beta.row(0) == moved.beta.row(0));
}

TEST_CASE("entropies follow the closed forms") {
  NeighborWeights nw{Eigen::MatrixXd::Zero(3, 4), Eigen::MatrixXd::Zero(3, 4)};
  nw.alpha.row(0) << 0.25, 0.25, 0.25, 0.25;
  nw.alpha.row(1) << 1, 0, 0, 0;
  nw.alpha.row(2) << 0.25, 0.75, 0, 0;
  nw.beta.row(0) << 0.5, 0.5, 0, 0;

  CHECK(hit_entropy(nw, 0) == doctest::Approx(std::log(4.0)));
  CHECK(hit_entropy(nw, 1) == 0.0);
  CHECK(hit_entropy(nw, 2) ==
        doctest::Approx(0.25 * std::log(4.0) + 0.75 * std::log(4.0 / 3.0)));
  CHECK(hit_entropy(nw, 2) == doctest::Approx(0.5623).epsilon(1e-4));
  CHECK(miss_entropy(nw, 0) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(hit_entropy(nw, 5), Error);
}

TEST_CASE("cost vanishes in the margin term for an equidistant configuration") {
  // Four points with all pairwise Manhattan distances equal; every
  // measurement matches, so softmax weights are uniform and the margin
  // contributions cancel. Only the entropy gap remains.
  const Dataset d = make({{0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}},
                         {0, 0, 1, 1});
  const WeightMatrix wm = uniform_diagonal_weights(3);
  const double sigma = 0.7;
  const NeighborWeights nw = update_neighbor_weights(d, wm, sigma);
  for (int n = 0; n < 4; ++n) {
    CHECK(hit_entropy(nw, n) == doctest::Approx(0.0));  // single hit
    CHECK(miss_entropy(nw, n) == doctest::Approx(std::log(2.0)));
  }
  // Margin term is zero, so the whole cost is the entropy gap.
  CHECK(cost(d, wm, nw, sigma) == doctest::Approx(sigma * 4 * std::log(2.0)));
  // Doubling sigma doubles the entropy term (and the cost, margin being 0).
  CHECK(cost(d, wm, nw, 2 * sigma) == doctest::Approx(2 * sigma * 4 * std::log(2.0)));
}

TEST_CASE("cost matches an independent summation on random data") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = random_binary(rng, 4 + static_cast<int>(rng.below(9)), 2);
    Rng wrng(trial + 100);
    const WeightMatrix wm = random_weights(2, wrng);
    const double sigma = 0.5 + rng.uniform();
    const NeighborWeights nw = update_neighbor_weights(d, wm, sigma);
    CHECK(cost(d, wm, nw, sigma) ==
          doctest::Approx(slow_cost(d, wm.W, nw, sigma)).epsilon(1e-10));

    // Linearity in sigma with the neighbor weights held fixed.
    const double gap = [&] {
      double g = 0;
      for (int n = 0; n < d.n_instances(); ++n)
        g += miss_entropy(nw, n) - hit_entropy(nw, n);
      return g;
    }();
    CHECK(cost(d, wm, nw, 2 * sigma) - cost(d, wm, nw, sigma) ==
          doctest::Approx(sigma * gap).epsilon(1e-12));

    // Uniform instance weights scale both terms by 1/N.
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(
        d.n_instances(), 1.0 / static_cast<double>(d.n_instances()));
    CHECK(cost(d, wm, nw, sigma, uniform) ==
          doctest::Approx(cost(d, wm, nw, sigma) / d.n_instances()));
  }
}

TEST_CASE("scatter_matrix reduces to hand outer products for point masses") {
  const Dataset d = make({{0, 1}, {2, 0}, {1, 5}, {4, 2}}, {0, 0, 1, 1});
  // Point-mass neighbor weights: each instance points at its one hit and
  // at one chosen miss.
  NeighborWeights nw{Eigen::MatrixXd::Zero(4, 4), Eigen::MatrixXd::Zero(4, 4)};
  nw.alpha(0, 1) = 1;
  nw.alpha(1, 0) = 1;
  nw.alpha(2, 3) = 1;
  nw.alpha(3, 2) = 1;
  nw.beta(0, 2) = 1;
  nw.beta(1, 3) = 1;
  nw.beta(2, 0) = 1;
  nw.beta(3, 1) = 1;

  Eigen::Matrix2d expected = Eigen::Matrix2d::Zero();
  const int hit_of[4] = {1, 0, 3, 2};
  const int miss_of[4] = {2, 3, 0, 1};
  for (int n = 0; n < 4; ++n) {
    const Eigen::Vector2d dh =
        (d.features.row(n) - d.features.row(hit_of[n])).cwiseAbs().transpose();
    const Eigen::Vector2d dm =
        (d.features.row(n) - d.features.row(miss_of[n])).cwiseAbs().transpose();
    expected += dh * dh.transpose() - dm * dm.transpose();
  }
  CHECK((scatter_matrix(d, nw) - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("scatter_matrix is zero for coincident instances and symmetric always") {
  const Dataset same = make({{3, 3}, {3, 3}, {3, 3}, {3, 3}}, {0, 0, 1, 1});
  const WeightMatrix wm = uniform_diagonal_weights(2);
  const NeighborWeights nw = update_neighbor_weights(same, wm, 1.0);
  CHECK(scatter_matrix(same, nw).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(87);
  for (int trial = 0; trial < 1000; ++trial) {
    const Dataset d = random_binary(rng, 4 + static_cast<int>(rng.below(8)),
                                    2 + static_cast<int>(rng.below(3)));
    Rng wrng(trial);
    const WeightMatrix w = random_weights(d.n_features(), wrng);
    const NeighborWeights n = update_neighbor_weights(d, w, 1.0);
    const Eigen::MatrixXd sigma_matrix = scatter_matrix(d, n);
    CHECK((sigma_matrix - sigma_matrix.transpose()).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("scatter_matrix with a point-mass instance weight isolates one term") {
  const Dataset d = make({{0, 1}, {2, 0}, {1, 5}, {4, 2}}, {0, 0, 1, 1});
  const WeightMatrix wm = uniform_diagonal_weights(2);
  const NeighborWeights nw = update_neighbor_weights(d, wm, 1.5);
  Eigen::VectorXd concentrated = Eigen::VectorXd::Zero(4);
  concentrated[1] = 1.0;

  Eigen::Matrix2d expected = Eigen::Matrix2d::Zero();
  for (int j = 0; j < 4; ++j) {
    if (j == 1) continue;
    const Eigen::Vector2d diff =
        (d.features.row(1) - d.features.row(j)).cwiseAbs().transpose();
    if (d.labels[static_cast<std::size_t>(j)] == d.labels[1])
      expected += nw.alpha(1, j) * diff * diff.transpose();
    else
      expected -= nw.beta(1, j) * diff * diff.transpose();
  }
  CHECK((scatter_matrix(d, nw, concentrated) - expected).cwiseAbs().maxCoeff() <=
        1e-14);

  Eigen::VectorXd bad = Eigen::VectorXd::Constant(4, 0.3);
  CHECK_THROWS_AS(scatter_matrix(d, nw, bad), Error);
  Eigen::VectorXd short_w = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(scatter_matrix(d, nw, short_w), Error);
}

TEST_CASE("update_weight_matrix solves the diagonal cases") {
  Eigen::Matrix2d sigma_matrix;
  sigma_matrix << -1, 0, 0, -1;
  WeightMatrix wm = update_weight_matrix(sigma_matrix);
  CHECK((wm.W - Eigen::Matrix2d::Identity() / std::sqrt(2.0)).cwiseAbs().maxCoeff() <=
        1e-12);

  sigma_matrix << -3, 0, 0, 4;
  wm = update_weight_matrix(sigma_matrix);
  Eigen::Matrix2d expected;
  expected << 1, 0, 0, 0;
  CHECK((wm.W - expected).cwiseAbs().maxCoeff() <= 1e-12);

  sigma_matrix << 2, 0, 0, 5;
  CHECK_THROWS_AS(update_weight_matrix(sigma_matrix), DegenerateUpdate);

  Eigen::MatrixXd rect(2, 3);
  CHECK_THROWS_AS(update_weight_matrix(rect), Error);
  Eigen::Matrix2d skew;
  skew << 0, 1, -1, 0;
  CHECK_THROWS_AS(update_weight_matrix(skew), Error);
}

TEST_CASE("update_weight_matrix minimizes the linearized cost") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index a = 2 + static_cast<Eigen::Index>(rng.below(5));
    Eigen::MatrixXd raw(a, a);
    for (Eigen::Index i = 0; i < a; ++i)
      for (Eigen::Index j = 0; j < a; ++j) raw(i, j) = rng.normal();
    const Eigen::MatrixXd sigma_matrix = 0.5 * (raw + raw.transpose());

    WeightMatrix wm;
    try {
      wm = update_weight_matrix(sigma_matrix);
    } catch (const DegenerateUpdate&) {
      continue;
    }
    check_weight_invariants(wm);

    const double achieved = (wm.W * sigma_matrix).trace();
    for (int c = 0; c < 100; ++c) {
      const Eigen::MatrixXd candidate = random_feasible(a, rng);
      CHECK(achieved <= (candidate * sigma_matrix).trace() + 1e-9);
    }
  }
}

TEST_CASE("one weight update does not increase the cost at fixed neighbors") {
  Rng rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = random_binary(rng, 8 + static_cast<int>(rng.below(10)), 3);
    Rng wrng(trial);
    const WeightMatrix before = random_weights(3, wrng);
    const double sigma = 0.5 + rng.uniform();
    const NeighborWeights nw = update_neighbor_weights(d, before, sigma);
    WeightMatrix after;
    try {
      after = update_weight_matrix(scatter_matrix(d, nw));
    } catch (const DegenerateUpdate&) {
      continue;
    }
    CHECK(cost(d, after, nw, sigma) <= cost(d, before, nw, sigma) + 1e-9);
  }
}

TEST_CASE("prune zeroes small entries and renormalizes") {
  WeightMatrix wm;
  wm.W.resize(2, 2);
  wm.W << 0.9, 0.05, 0.05, 0.3;
  wm.W /= wm.W.norm();

  const WeightMatrix unchanged = prune(wm, 0.0);
  CHECK((unchanged.W - wm.W).cwiseAbs().maxCoeff() <= 1e-15);

  const WeightMatrix pruned = prune(wm, 0.1);
  Eigen::Matrix2d expected;
  expected << 3, 0, 0, 1;  // surviving diagonal had ratio 0.9 : 0.3
  expected /= expected.norm();
  CHECK((pruned.W - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(pruned.asymmetry() == 0.0);
  CHECK(pruned.frobenius() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(prune(wm, 2.0), Error);
  CHECK_THROWS_AS(prune(wm, -0.5), Error);
}

TEST_CASE("any unit-norm weight matrix survives pruning at one over A") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index a = 2 + static_cast<Eigen::Index>(rng.below(7));
    const WeightMatrix wm = random_weights(a, rng);
    const WeightMatrix pruned = prune(wm, 1.0 / static_cast<double>(a));
    CHECK(pruned.frobenius() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("train separates two clean clusters with dominant main effects") {
  Rng rng(5);
  Dataset d;
  d.feature_names = {"f0", "f1"};
  d.features.resize(40, 2);
  for (int i = 0; i < 40; ++i) {
    const int label = i < 20 ? 0 : 1;
    d.labels.push_back(label);
    d.features(i, 0) = 0.25 * rng.normal() + (label ? 4.0 : -4.0);
    d.features(i, 1) = 0.25 * rng.normal() + (label ? 4.0 : -4.0);
  }
  Hyperparameters hp;
  hp.sigma = 1.0;
  const ImmigrateModel model = train(d, hp);
  check_weight_invariants(model.weights);
  CHECK(model.diagnostics.iterations <= 10);
  const Eigen::MatrixXd& w = model.weights.W;
  CHECK(w(0, 1) <= std::max(w(0, 0), w(1, 1)));

  // The clusters are far apart, so training classifies its own data.
  const std::vector<int> fitted = predict(model, d.features);
  CHECK(fitted == d.labels);
}

TEST_CASE("train keeps every iterate feasible and every row normalized") {
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const Dataset d = random_binary(rng, 8 + static_cast<int>(rng.below(20)),
                                    2 + static_cast<int>(rng.below(4)));
    Hyperparameters hp;
    hp.sigma = 0.25 * std::pow(2.0, static_cast<double>(rng.below(5)));
    hp.seed = trial;
    TrainOptions options;
    int calls = 0;
    options.observer = [&](const WeightMatrix& wm, const NeighborWeights& nw,
                           double) {
      ++calls;
      check_weight_invariants(wm);
      for (int n = 0; n < d.n_instances(); ++n) {
        CHECK(std::abs(nw.alpha.row(n).sum() - 1.0) <= 1e-12);
        CHECK(std::abs(nw.beta.row(n).sum() - 1.0) <= 1e-12);
      }
    };
    const ImmigrateModel model = train(d, hp, options);
    CHECK(calls == model.diagnostics.iterations);
    CHECK(model.diagnostics.iterations <= hp.max_iterations);
    CHECK(model.diagnostics.cost_history.size() ==
          static_cast<std::size_t>(model.diagnostics.iterations));
  }
}

TEST_CASE("train stops at a stationary point of the neighbor weights") {
  Rng rng(91);
  const Dataset d = random_binary(rng, 16, 3);
  Hyperparameters hp;
  hp.sigma = 1.5;
  const ImmigrateModel model = train(d, hp);
  const NeighborWeights nw =
      update_neighbor_weights(d, model.weights, model.sigma);

  // Perturb along in-simplex directions; the directional derivative of the
  // cost vanishes at the softmax solution.
  for (const int n : {0, 5}) {
    int first = -1, second = -1;
    for (int j = 0; j < d.n_instances(); ++j) {
      if (nw.alpha(n, j) <= 0.0) continue;
      if (first < 0) first = j;
      else if (second < 0) second = j;
    }
    REQUIRE(second >= 0);
    const double delta = 1e-3;
    NeighborWeights plus = nw, minus = nw;
    plus.alpha(n, first) += delta;
    plus.alpha(n, second) -= delta;
    minus.alpha(n, first) -= delta;
    minus.alpha(n, second) += delta;
    const double derivative =
        (cost(d, model.weights, plus, model.sigma) -
         cost(d, model.weights, minus, model.sigma)) /
        (2 * delta);
    CHECK(std::abs(derivative) <= 1e-2);
  }
}

TEST_CASE("train falls back to uniform diagonal weights when degenerate") {
  // Interleaved classes: misses are closer than hits everywhere, so the
  // scatter difference is positive and the first update is undefined.
  const Dataset d = make({{0}, {1}, {2}, {3}}, {0, 1, 0, 1});
  Hyperparameters hp;
  hp.sigma = 1.0;
  const ImmigrateModel model = train(d, hp);
  CHECK(model.diagnostics.degenerate_stop);
  CHECK(model.diagnostics.iterations == 1);
  CHECK(model.weights.W(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("train honors explicit initial weights and instance weights") {
  Rng rng(15);
  const Dataset d = random_binary(rng, 14, 3);
  Hyperparameters hp;
  hp.sigma = 0.5;
  hp.max_iterations = 1;

  TrainOptions fixed_start;
  fixed_start.initial_weights = uniform_diagonal_weights(3);
  const ImmigrateModel a = train(d, hp, fixed_start);
  Hyperparameters other_seed = hp;
  other_seed.seed = 999;
  const ImmigrateModel b = train(d, other_seed, fixed_start);
  CHECK(a.weights.W == b.weights.W);  // seed only feeds the random start

  // Uniform instance weights rescale the scatter without moving its
  // eigenvectors, so the one-step result is unchanged.
  TrainOptions weighted = fixed_start;
  weighted.instance_weights = Eigen::VectorXd::Constant(14, 1.0 / 14.0);
  const ImmigrateModel c = train(d, hp, weighted);
  CHECK((a.weights.W - c.weights.W).cwiseAbs().maxCoeff() <= 1e-12);

  TrainOptions bad = fixed_start;
  bad.instance_weights = Eigen::VectorXd::Constant(14, 1.0);
  CHECK_THROWS_AS(train(d, hp, bad), Error);

  const Dataset singleton = make({{0}, {1}, {2}}, {0, 0, 1});
  CHECK_THROWS_WITH_AS(train(singleton, hp), doctest::Contains("instance 2"),
                       Error);
}

TEST_CASE("train with pruning returns a pruned feasible matrix") {
  Rng rng(44);
  const Dataset d = random_binary(rng, 20, 4);
  Hyperparameters hp;
  hp.sigma = 1.0;
  hp.prune_enabled = true;  // threshold defaults to 1/A
  const ImmigrateModel model = train(d, hp);
  const Eigen::MatrixXd& w = model.weights.W;
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      CHECK((w(i, j) == 0.0 || w(i, j) >= 0.25));
  CHECK(model.weights.frobenius() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("predict returns the class with the smallest weighted measurement") {
  // Hand-built model: one training instance per class.
  ImmigrateModel model;
  model.weights = uniform_diagonal_weights(2);
  model.sigma = 1.0;
  model.training_data = make({{0, 0}, {3, 3}}, {0, 1});
  model.class_ids = {0, 1};
  Eigen::RowVectorXd x(2);
  x << 0, 0;
  CHECK(predict(model, x) == 0);
  x << 3, 3;
  CHECK(predict(model, x) == 1);

  // Mirrored classes tie; the smaller id wins.
  model.training_data = make({{-1}, {-2}, {1}, {2}}, {0, 0, 1, 1});
  model.weights = uniform_diagonal_weights(1);
  Eigen::RowVectorXd origin(1);
  origin << 0;
  CHECK(predict(model, origin) == 0);

  Eigen::RowVectorXd wrong(3);
  CHECK_THROWS_AS(predict(model, wrong), Error);

  model.class_ids = {0, 1, 2};
  CHECK_THROWS_WITH_AS(predict(model, origin), doctest::Contains("class 2"),
                       Error);
}

TEST_CASE("predict at tiny sigma is nearest-neighbor under the measurement") {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = random_binary(rng, 10 + static_cast<int>(rng.below(10)), 3);
    Hyperparameters hp;
    hp.sigma = 1.0;
    hp.seed = trial;
    ImmigrateModel model = train(d, hp);
    model.sigma = 1e-6;
    for (int query = 0; query < 10; ++query) {
      Eigen::RowVectorXd x(3);
      for (int j = 0; j < 3; ++j) x[j] = 2 * rng.normal();
      double best = 1e300;
      int nearest_label = -1;
      for (int n = 0; n < d.n_instances(); ++n) {
        const double q = quadratic_manhattan(x.transpose(),
                                             d.features.row(n).transpose(),
                                             model.weights);
        if (q < best) {
          best = q;
          nearest_label = d.labels[static_cast<std::size_t>(n)];
        }
      }
      CHECK(predict(model, x) == nearest_label);
    }
  }
}

TEST_CASE("predict ignores the ordering of training instances") {
  Rng rng(123);
  const Dataset d = random_binary(rng, 18, 2);
  Hyperparameters hp;
  hp.sigma = 0.5;
  const ImmigrateModel model = train(d, hp);

  std::vector<int> order(18);
  for (int i = 0; i < 18; ++i) order[i] = i;
  Rng shuffler(7);
  shuffler.shuffle(order);
  ImmigrateModel shuffled = model;
  shuffled.training_data = subset(d, order);

  for (int query = 0; query < 20; ++query) {
    Eigen::RowVectorXd x(2);
    x << 3 * rng.normal(), 3 * rng.normal();
    CHECK(predict(model, x) == predict(shuffled, x));
  }
}

TEST_CASE("sigma grid and tuning tie-breaks") {
  CHECK(sigma_grid() == std::vector<double>{4.0, 2.0, 1.0, 0.5, 0.25});

  // Far-apart clusters: every candidate classifies perfectly, so the
  // tie-break picks the largest sigma without pruning.
  Rng rng(17);
  Dataset d;
  d.feature_names = {"f0", "f1"};
  d.features.resize(24, 2);
  for (int i = 0; i < 24; ++i) {
    const int label = i % 2;
    d.labels.push_back(label);
    d.features(i, 0) = 0.1 * rng.normal() + (label ? 50.0 : -50.0);
    d.features(i, 1) = 0.1 * rng.normal();
  }
  Hyperparameters base;
  base.seed = 3;
  const Hyperparameters tuned = tune_sigma(d, base, 3);
  CHECK(tuned.sigma == 4.0);
  CHECK_FALSE(tuned.prune_enabled);
}

TEST_SUITE_END();
