#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "ecgemo/emotion.hpp"
#include "ecgemo/features.hpp"

namespace ecgemo::forest {

using Vector = std::vector<double>;
using Counts = std::array<int, kNumEmotions>;

/// Flat node. `feature < 0` marks a leaf; internal nodes route x[feature] <= threshold left.
struct Node {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Counts class_counts{};
};

/// Nodes are stored in pre-order; node 0 is the root.
struct DecisionTree {
  std::vector<Node> nodes;

  Emotion predict(const Vector& x) const;
  std::size_t depth() const;
};

struct ForestParams {
  std::size_t num_trees = 90;
  /// 0 selects ceil(sqrt(d)).
  std::size_t features_per_split = 0;
  /// 0 means unlimited.
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;
  /// Test hook: grow every tree on the full training set instead of a bootstrap.
  bool bootstrap = true;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::size_t features_per_split = 0;
  std::size_t dimension = 0;
  /// Out-of-bag misclassification rate; nullopt when no sample was ever out of bag.
  std::optional<double> oob_error;

  std::size_t num_trees() const { return trees.size(); }
  /// The first `n` trees. Trees are grown from per-index seeds, so this equals
  /// a forest trained with num_trees = n (OOB estimate excepted).
  ForestModel prefix(std::size_t n) const;
};

/// Gini impurity 1 - sum p_c^2 of a count vector.
double gini(const Counts& counts);

/// Best (feature, threshold) by Gini decrease over the given features.
/// Thresholds are midpoints of consecutive distinct sorted values.
struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};
std::optional<Split> best_split(const std::vector<Vector>& x, const std::vector<Emotion>& y,
                                const std::vector<std::size_t>& rows, const std::vector<std::size_t>& candidate_features,
                                std::size_t min_leaf);

DecisionTree grow_tree(const std::vector<Vector>& x, const std::vector<Emotion>& y, std::vector<std::size_t> rows,
                       const ForestParams& params, std::size_t features_per_split, std::uint64_t seed);

/// Throws ParameterError on an empty training set or num_trees == 0.
ForestModel train_forest(const std::vector<features::FeatureVector>& train, const ForestParams& params,
                         std::uint64_t seed);

Counts vote_counts(const ForestModel& model, const Vector& x);
/// Plurality vote; ties to the lowest class code.
Emotion predict_forest(const ForestModel& model, const Vector& x);

/// Fraction of trees voting for `truth` minus the largest fraction voting for any other class.
double margin(const ForestModel& model, const Vector& x, Emotion truth);

/// Fraction of points with negative margin. Throws ParameterError on empty data.
double generalization_error(const ForestModel& model, const std::vector<features::FeatureVector>& data);
/// Out-of-bag estimate. Throws UsageError if the model has none.
double generalization_error(const ForestModel& model);

}  // namespace ecgemo::forest
