#include "ecgemo/forest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "ecgemo/error.hpp"
#include "ecgemo/random.hpp"

namespace ecgemo::forest {
namespace {

std::size_t label_index(Emotion e) { return static_cast<std::size_t>(code(e)); }

Emotion argmax(const Counts& c) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    if (c[k] > c[best]) best = k;
  }
  return static_cast<Emotion>(best);
}

int total(const Counts& c) { return std::accumulate(c.begin(), c.end(), 0); }

void check_dimension(const ForestModel& model, const Vector& x) {
  if (model.trees.empty()) throw UsageError("forest has no trees");
  if (x.size() != model.dimension) {
    throw ParameterError("input has " + std::to_string(x.size()) + " features, forest expects " +
                         std::to_string(model.dimension));
  }
}

}  // namespace

double gini(const Counts& counts) {
  const int n = total(counts);
  if (n == 0) return 0.0;
  double s = 0.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / n;
    s += p * p;
  }
  return 1.0 - s;
}

Emotion DecisionTree::predict(const Vector& x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return argmax(nodes[static_cast<std::size_t>(i)].class_counts);
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(int)> walk = [&](int i) -> std::size_t {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) return 0;
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return nodes.empty() ? 0 : walk(0);
}

std::optional<Split> best_split(const std::vector<Vector>& x, const std::vector<Emotion>& y,
                                const std::vector<std::size_t>& rows, const std::vector<std::size_t>& candidate_features,
                                std::size_t min_leaf) {
  Counts parent{};
  for (std::size_t r : rows) ++parent[label_index(y[r])];
  const double n = static_cast<double>(rows.size());
  const double parent_impurity = gini(parent);

  std::optional<Split> best;
  std::vector<std::size_t> sorted(rows);
  for (std::size_t f : candidate_features) {
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      return x[a][f] < x[b][f] || (x[a][f] == x[b][f] && a < b);
    });
    Counts left{};
    Counts right = parent;
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      const std::size_t r = sorted[k];
      ++left[label_index(y[r])];
      --right[label_index(y[r])];
      const double v = x[r][f];
      const double next = x[sorted[k + 1]][f];
      if (!(next > v)) continue;
      const std::size_t nl = k + 1;
      const std::size_t nr = sorted.size() - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double weighted = (static_cast<double>(nl) * gini(left) + static_cast<double>(nr) * gini(right)) / n;
      const double decrease = parent_impurity - weighted;
      if (!best || decrease > best->decrease) {
        double threshold = v + (next - v) / 2.0;
        if (!(threshold < next)) threshold = v;  // adjacent doubles
        best = Split{static_cast<int>(f), threshold, decrease};
      }
    }
  }
  return best;
}

DecisionTree grow_tree(const std::vector<Vector>& x, const std::vector<Emotion>& y, std::vector<std::size_t> rows,
                       const ForestParams& params, std::size_t features_per_split, std::uint64_t seed) {
  const std::size_t dim = x.front().size();
  Rng rng(seed);
  DecisionTree tree;
  std::vector<std::size_t> all_features(dim);
  std::iota(all_features.begin(), all_features.end(), std::size_t{0});

  std::function<int(std::vector<std::size_t>&, std::size_t)> build = [&](std::vector<std::size_t>& node_rows,
                                                                         std::size_t depth) -> int {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    Counts counts{};
    for (std::size_t r : node_rows) ++counts[label_index(y[r])];
    tree.nodes[static_cast<std::size_t>(id)].class_counts = counts;

    const bool pure = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) <= 1;
    const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
    if (pure || depth_capped || node_rows.size() < 2 * params.min_leaf) return id;

    // features sampled without replacement
    for (std::size_t i = 0; i < features_per_split; ++i) {
      std::swap(all_features[i], all_features[i + rng.index(dim - i)]);
    }
    std::vector<std::size_t> candidates(all_features.begin(), all_features.begin() + static_cast<long>(features_per_split));
    const auto split = best_split(x, y, node_rows, candidates, params.min_leaf);
    if (!split || split->decrease <= 0.0) return id;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : node_rows) {
      (x[r][static_cast<std::size_t>(split->feature)] <= split->threshold ? left_rows : right_rows).push_back(r);
    }
    node_rows.clear();
    node_rows.shrink_to_fit();
    const int left = build(left_rows, depth + 1);
    const int right = build(right_rows, depth + 1);
    Node& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = left;
    node.right = right;
    return id;
  };
  build(rows, 0);
  return tree;
}

ForestModel ForestModel::prefix(std::size_t n) const {
  if (n < 1 || n > trees.size()) throw ParameterError("prefix size must lie in [1, num_trees]");
  ForestModel out;
  out.trees.assign(trees.begin(), trees.begin() + static_cast<long>(n));
  out.features_per_split = features_per_split;
  out.dimension = dimension;
  return out;
}

ForestModel train_forest(const std::vector<features::FeatureVector>& train, const ForestParams& params,
                         std::uint64_t seed) {
  if (train.empty()) throw ParameterError("forest training set is empty");
  if (params.num_trees < 1) throw ParameterError("forest needs at least one tree");
  if (params.min_leaf < 1) throw ParameterError("min_leaf must be at least 1");
  const std::size_t dim = train.front().values.size();
  if (dim == 0) throw ParameterError("feature vectors are empty");
  features::check_dimensions(train, dim);
  std::size_t mtry = params.features_per_split;
  if (mtry == 0) mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim))));
  if (mtry > dim) {
    throw ParameterError("features_per_split " + std::to_string(mtry) + " exceeds dimension " + std::to_string(dim));
  }

  std::vector<Vector> x;
  std::vector<Emotion> y;
  x.reserve(train.size());
  for (const auto& v : train) {
    x.push_back(v.values);
    y.push_back(v.label);
  }
  const std::size_t n = x.size();

  ForestModel model;
  model.features_per_split = mtry;
  model.dimension = dim;
  std::vector<Counts> oob_votes(n, Counts{});
  for (std::size_t t = 0; t < params.num_trees; ++t) {
    const std::uint64_t tree_seed = derive_seed(seed, t);
    std::vector<std::size_t> rows(n);
    std::vector<char> in_bag(n, 0);
    if (params.bootstrap) {
      Rng boot(derive_seed(tree_seed, tag("bootstrap")));
      for (auto& r : rows) {
        r = boot.index(n);
        in_bag[r] = 1;
      }
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
      std::fill(in_bag.begin(), in_bag.end(), 1);
    }
    model.trees.push_back(grow_tree(x, y, std::move(rows), params, mtry, derive_seed(tree_seed, tag("grow"))));
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_bag[i]) ++oob_votes[i][label_index(model.trees.back().predict(x[i]))];
    }
  }

  std::size_t counted = 0, wrong = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (total(oob_votes[i]) == 0) continue;
    ++counted;
    if (argmax(oob_votes[i]) != y[i]) ++wrong;
  }
  if (counted > 0) model.oob_error = static_cast<double>(wrong) / static_cast<double>(counted);
  return model;
}

Counts vote_counts(const ForestModel& model, const Vector& x) {
  check_dimension(model, x);
  Counts c{};
  for (const auto& tree : model.trees) ++c[label_index(tree.predict(x))];
  return c;
}

Emotion predict_forest(const ForestModel& model, const Vector& x) { return argmax(vote_counts(model, x)); }

double margin(const ForestModel& model, const Vector& x, Emotion truth) {
  const Counts c = vote_counts(model, x);
  const double n = static_cast<double>(model.trees.size());
  int other = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k != label_index(truth)) other = std::max(other, c[k]);
  }
  return (c[label_index(truth)] - other) / n;
}

double generalization_error(const ForestModel& model, const std::vector<features::FeatureVector>& data) {
  if (data.empty()) throw ParameterError("generalization error of an empty data set");
  std::size_t negative = 0;
  for (const auto& v : data) {
    if (margin(model, v.values, v.label) < 0.0) ++negative;
  }
  return static_cast<double>(negative) / static_cast<double>(data.size());
}

double generalization_error(const ForestModel& model) {
  if (!model.oob_error) throw UsageError("forest carries no out-of-bag estimate");
  return *model.oob_error;
}

}  // namespace ecgemo::forest
