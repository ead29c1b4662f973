#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "ecgemo/error.hpp"
#include "ecgemo/forest.hpp"
#include "test_support.hpp"

using namespace ecgemo;
using features::FeatureVector;
using forest::Counts;

namespace {

forest::DecisionTree leaf(Emotion e) {
  forest::DecisionTree t;
  forest::Node n;
  n.class_counts[static_cast<std::size_t>(code(e))] = 1;
  t.nodes.push_back(n);
  return t;
}

forest::ForestModel voters(const std::vector<Emotion>& votes, std::size_t dim = 1) {
  forest::ForestModel m;
  for (Emotion e : votes) m.trees.push_back(leaf(e));
  m.dimension = dim;
  m.features_per_split = 1;
  return m;
}

std::vector<Emotion> repeat(std::initializer_list<std::pair<Emotion, int>> spec) {
  std::vector<Emotion> out;
  for (auto [e, n] : spec) out.insert(out.end(), static_cast<std::size_t>(n), e);
  return out;
}

double weighted_gini_decrease(const std::vector<forest::Vector>& x, const std::vector<Emotion>& y, int f, double t) {
  Counts all{}, left{}, right{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto c = static_cast<std::size_t>(code(y[i]));
    ++all[c];
    ++(x[i][static_cast<std::size_t>(f)] <= t ? left : right)[c];
  }
  auto total = [](const Counts& c) { return static_cast<double>(c[0] + c[1] + c[2] + c[3]); };
  if (total(left) == 0 || total(right) == 0) return -1.0;
  const double n = total(all);
  return forest::gini(all) - total(left) / n * forest::gini(left) - total(right) / n * forest::gini(right);
}

}  // namespace

TEST_CASE("gini impurity") {
  CHECK(forest::gini({4, 0, 0, 0}) == 0.0);
  CHECK(forest::gini({1, 1, 1, 1}) == doctest::Approx(0.75));
  CHECK(forest::gini({2, 2, 0, 0}) == doctest::Approx(0.5));
  CHECK(forest::gini({0, 0, 0, 0}) == 0.0);
}

TEST_CASE("a single tree splits two points perfectly") {
  const std::vector<FeatureVector> train{{{0.0}, Emotion::Happy, {}}, {{1.0}, Emotion::Exciting, {}}};
  const auto m = forest::train_forest(train, {.num_trees = 1, .bootstrap = false}, 1);
  REQUIRE(m.trees.size() == 1);
  const auto& root = m.trees[0].nodes[0];
  CHECK(root.feature == 0);
  CHECK(root.threshold > 0.0);
  CHECK(root.threshold < 1.0);
  CHECK(predict_forest(m, {0.0}) == Emotion::Happy);
  CHECK(predict_forest(m, {1.0}) == Emotion::Exciting);
}

TEST_CASE("forest separates four blobs") {
  const auto train = ecgemo::testing::blobs(100, 0.1, 1);
  const auto test = ecgemo::testing::blobs(100, 0.1, 2);
  const auto m = forest::train_forest(train, {}, 7);
  CHECK(m.num_trees() == 90);
  CHECK(m.features_per_split == 2);
  const double acc = ecgemo::testing::accuracy_of(test, [&](const auto& x) { return forest::predict_forest(m, x); });
  CHECK(acc >= 0.97);
  CHECK(forest::generalization_error(m, test) <= 0.03);
  REQUIRE(m.oob_error.has_value());
  CHECK(*m.oob_error <= 0.05);
}

TEST_CASE("90 trees on 75 features trains") {
  Rng rng(5);
  std::vector<FeatureVector> train;
  for (int i = 0; i < 200; ++i) {
    const Emotion e = static_cast<Emotion>(i % 4);
    forest::Vector v(75);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng.normal() + (k < 4 && k == static_cast<std::size_t>(i % 4) ? 3.0 : 0.0);
    train.push_back({v, e, {}});
  }
  const auto m = forest::train_forest(train, {.num_trees = 90}, 3);
  CHECK(m.num_trees() == 90);
  CHECK(m.features_per_split == 9);
  CHECK(m.dimension == 75);
}

TEST_CASE("identical trees vote unanimously") {
  const auto train = ecgemo::testing::blobs(20, 0.3, 4);
  forest::ForestParams p{.num_trees = 7, .features_per_split = 2, .bootstrap = false};
  const auto m = forest::train_forest(train, p, 2);
  for (const auto& v : train) {
    const Counts c = forest::vote_counts(m, v.values);
    CHECK(*std::max_element(c.begin(), c.end()) == 7);
  }
}

TEST_CASE("vote ties go to the lowest class code") {
  CHECK(forest::predict_forest(voters({Emotion::Tense, Emotion::Exciting}), {0.0}) == Emotion::Exciting);
  CHECK(forest::predict_forest(voters({Emotion::Exciting, Emotion::Happy}), {0.0}) == Emotion::Happy);
}

TEST_CASE("a point deep inside a blob wins most trees") {
  const auto train = ecgemo::testing::blobs(100, 0.1, 1);
  const auto m = forest::train_forest(train, {}, 11);
  const Counts c = forest::vote_counts(m, {1.0, 1.0});
  CHECK(c[3] >= static_cast<int>(0.8 * 90));
}

TEST_CASE("margins") {
  CHECK(forest::margin(voters(repeat({{Emotion::Calm, 5}})), {0.0}, Emotion::Calm) == 1.0);
  CHECK(forest::margin(voters(repeat({{Emotion::Calm, 5}})), {0.0}, Emotion::Tense) == -1.0);
  const auto split = voters(repeat({{Emotion::Happy, 6}, {Emotion::Exciting, 3}, {Emotion::Tense, 1}}));
  CHECK(forest::margin(split, {0.0}, Emotion::Happy) == doctest::Approx(0.3));
}

TEST_CASE("generalization error bounds") {
  const auto train = ecgemo::testing::blobs(20, 0.05, 6);
  const auto m = forest::train_forest(train, {.num_trees = 15}, 1);
  CHECK(forest::generalization_error(m, train) == 0.0);
  auto flipped = train;
  for (auto& v : flipped) v.label = static_cast<Emotion>((code(v.label) + 1) % 4);
  CHECK(forest::generalization_error(m, flipped) == 1.0);
  CHECK_THROWS_AS(forest::generalization_error(m, std::vector<FeatureVector>{}), ParameterError);
}

TEST_CASE("generalization error agrees with vote counts and bounds accuracy") {
  const auto train = ecgemo::testing::blobs(40, 0.45, 8);
  const auto test = ecgemo::testing::blobs(40, 0.45, 9);
  const auto m = forest::train_forest(train, {.num_trees = 25}, 4);
  std::size_t negative = 0, correct = 0, lost_ties = 0;
  for (const auto& v : test) {
    const Counts c = forest::vote_counts(m, v.values);
    const int truth = c[static_cast<std::size_t>(code(v.label))];
    int other = 0;
    for (std::size_t k = 0; k < 4; ++k)
      if (k != static_cast<std::size_t>(code(v.label))) other = std::max(other, c[k]);
    const Emotion pred = forest::predict_forest(m, v.values);
    negative += truth < other;
    correct += pred == v.label;
    lost_ties += truth == other && pred != v.label;
  }
  const double n = static_cast<double>(test.size());
  const double ge = forest::generalization_error(m, test);
  CHECK(ge == static_cast<double>(negative) / n);
  CHECK(correct / n == doctest::Approx(1.0 - ge - lost_ties / n));
  CHECK(correct / n <= 1.0 - ge + 1e-12);
}

TEST_CASE("prefixes equal smaller forests") {
  const auto train = ecgemo::testing::blobs(30, 0.3, 2);
  const auto big = forest::train_forest(train, {.num_trees = 30}, 5);
  const auto small = forest::train_forest(train, {.num_trees = 10}, 5);
  const auto pre = big.prefix(10);
  REQUIRE(pre.num_trees() == 10);
  for (std::size_t t = 0; t < 10; ++t) {
    REQUIRE(pre.trees[t].nodes.size() == small.trees[t].nodes.size());
    for (std::size_t i = 0; i < small.trees[t].nodes.size(); ++i) {
      CHECK(pre.trees[t].nodes[i].feature == small.trees[t].nodes[i].feature);
      CHECK(pre.trees[t].nodes[i].threshold == small.trees[t].nodes[i].threshold);
      CHECK(pre.trees[t].nodes[i].class_counts == small.trees[t].nodes[i].class_counts);
    }
  }
  CHECK_THROWS_AS(big.prefix(0), ParameterError);
  CHECK_THROWS_AS(big.prefix(31), ParameterError);
}

TEST_CASE("best split matches exhaustive search on small sets") {
  Rng rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 10);
    std::vector<forest::Vector> x(n, forest::Vector(2));
    std::vector<Emotion> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      // coarse grid values so duplicates occur
      x[i] = {std::round(rng.uniform(0.0, 5.0)), std::round(rng.uniform(0.0, 5.0))};
      y[i] = static_cast<Emotion>(rng.index(3));
    }
    double best = -1.0;
    for (int f = 0; f < 2; ++f) {
      std::set<double> vals;
      for (const auto& v : x) vals.insert(v[static_cast<std::size_t>(f)]);
      for (auto it = vals.begin(); std::next(it) != vals.end(); ++it)
        best = std::max(best, weighted_gini_decrease(x, y, f, 0.5 * (*it + *std::next(it))));
    }
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto split = forest::best_split(x, y, rows, {0, 1}, 1);
    if (best <= 1e-12) {
      // no candidate improves impurity (pure node or all points equal)
      if (split) CHECK(split->decrease == doctest::Approx(best).epsilon(1e-9));
      continue;
    }
    REQUIRE(split.has_value());
    CHECK(split->decrease == doctest::Approx(best).epsilon(1e-9));
    CHECK(weighted_gini_decrease(x, y, split->feature, split->threshold) == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("max depth limits tree depth") {
  const auto train = ecgemo::testing::blobs(50, 0.5, 3);
  const auto m = forest::train_forest(train, {.num_trees = 5, .max_depth = 2}, 1);
  for (const auto& t : m.trees) CHECK(t.depth() <= 2);
  const auto deep = forest::train_forest(train, {.num_trees = 5}, 1);
  std::size_t max_depth = 0;
  for (const auto& t : deep.trees) max_depth = std::max(max_depth, t.depth());
  CHECK(max_depth > 2);
}

TEST_CASE("training and prediction errors") {
  CHECK_THROWS_AS(forest::train_forest({}, {}, 0), ParameterError);
  const auto train = ecgemo::testing::blobs(5, 0.1, 1);
  CHECK_THROWS_AS(forest::train_forest(train, {.num_trees = 0}, 0), ParameterError);
  CHECK_THROWS_AS(forest::train_forest(train, {.features_per_split = 3}, 0), ParameterError);
  const auto m = forest::train_forest(train, {.num_trees = 3}, 0);
  CHECK_THROWS_AS(forest::predict_forest(m, {0.0}), ParameterError);
  CHECK_THROWS_AS(forest::predict_forest(forest::ForestModel{}, {0.0, 0.0}), UsageError);
  CHECK_THROWS_AS(forest::generalization_error(forest::ForestModel{}), UsageError);
}

TEST_CASE("training is deterministic per seed") {
  const auto train = ecgemo::testing::blobs(30, 0.3, 2);
  const auto a = forest::train_forest(train, {.num_trees = 10}, 5);
  const auto b = forest::train_forest(train, {.num_trees = 10}, 5);
  for (std::size_t t = 0; t < 10; ++t) CHECK(a.trees[t].nodes.size() == b.trees[t].nodes.size());
  CHECK(a.oob_error == b.oob_error);
}
