#include "ecgemo/knn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ecgemo/error.hpp"
#include "ecgemo/pso.hpp"
#include "ecgemo/text.hpp"

namespace ecgemo::knn {

std::string to_string(const Metric& m) {
  switch (m.kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Cosine: return "cosine";
    case MetricKind::ChiSquare: return "chisquare";
    case MetricKind::Minkowski: return "minkowski:" + text::format_double(m.p);
  }
  return "?";
}

Metric parse_metric(std::string_view t) {
  t = text::trim(t);
  if (t == "euclidean") return Metric::euclidean();
  if (t == "cosine") return Metric::cosine();
  if (t == "chisquare" || t == "chi-square" || t == "chi2") return Metric::chi_square();
  if (t.starts_with("minkowski")) {
    t.remove_prefix(9);
    if (t.empty()) return Metric::minkowski(2.0);
    if (t.front() != ':') throw ParameterError("malformed metric: minkowski" + std::string(t));
    t.remove_prefix(1);
    const double p = text::parse_double(t);
    if (!(p >= 1.0)) throw ParameterError("Minkowski order must be >= 1");
    return Metric::minkowski(p);
  }
  throw ParameterError("unknown distance metric: " + std::string(t));
}

double distance(const Metric& metric, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw ParameterError("distance arguments differ in length (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
  switch (metric.kind) {
    case MetricKind::Euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
      return std::sqrt(s);
    }
    case MetricKind::Cosine: {
      double dot = 0.0, nx = 0.0, ny = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
      }
      if (nx == 0.0 || ny == 0.0) throw ParameterError("cosine distance with a zero vector");
      if (x == y) return 0.0;
      return std::max(0.0, 1.0 - dot / (std::sqrt(nx) * std::sqrt(ny)));
    }
    case MetricKind::Minkowski: {
      if (!(metric.p >= 1.0)) throw ParameterError("Minkowski order must be >= 1");
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), metric.p);
      return std::pow(s, 1.0 / metric.p);
    }
    case MetricKind::ChiSquare: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d / (std::abs(x[i]) + std::abs(y[i]) + kChiSquareEpsilon);
      }
      return s;
    }
  }
  return 0.0;
}

KnnModel::KnnModel(std::vector<Vector> points, std::vector<Emotion> labels, std::size_t k, Metric metric)
    : points_(std::move(points)), labels_(std::move(labels)), k_(k), metric_(metric) {
  if (points_.empty()) throw ParameterError("K-NN needs at least one training point");
  if (points_.size() != labels_.size()) throw ParameterError("point and label counts differ");
  if (k_ < 1 || k_ > points_.size()) {
    throw ParameterError("k = " + std::to_string(k_) + " must lie in [1, " + std::to_string(points_.size()) + "]");
  }
  if (metric_.kind == MetricKind::Minkowski && !(metric_.p >= 1.0)) throw ParameterError("Minkowski order must be >= 1");
  for (const auto& p : points_) {
    if (p.size() != points_.front().size()) throw ParameterError("training points differ in length");
  }
}

namespace {

std::vector<Vector> values_of(const std::vector<features::FeatureVector>& v) {
  std::vector<Vector> out;
  out.reserve(v.size());
  for (const auto& f : v) out.push_back(f.values);
  return out;
}

std::vector<Emotion> labels_of(const std::vector<features::FeatureVector>& v) {
  std::vector<Emotion> out;
  out.reserve(v.size());
  for (const auto& f : v) out.push_back(f.label);
  return out;
}

}  // namespace

KnnModel::KnnModel(const std::vector<features::FeatureVector>& train, std::size_t k, Metric metric)
    : KnnModel(values_of(train), labels_of(train), k, metric) {}

namespace {

// Plurality vote over the first k entries of a (distance, index)-sorted neighbour list.
Emotion vote(const std::vector<std::pair<double, std::size_t>>& sorted, const std::vector<Emotion>& labels,
             std::size_t k) {
  std::array<int, kNumEmotions> count{};
  std::array<double, kNumEmotions> dist_sum{};
  for (std::size_t r = 0; r < k; ++r) {
    const auto c = static_cast<std::size_t>(code(labels[sorted[r].second]));
    ++count[c];
    dist_sum[c] += sorted[r].first;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumEmotions; ++c) {
    if (count[c] > count[best] || (count[c] == count[best] && dist_sum[c] < dist_sum[best])) best = c;
  }
  return static_cast<Emotion>(best);
}

std::vector<std::pair<double, std::size_t>> nearest(const std::vector<Vector>& points, const Metric& metric,
                                                    const Vector& x, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d[i] = {distance(metric, points[i], x), i};
  std::partial_sort(d.begin(), d.begin() + static_cast<long>(k), d.end());
  d.resize(k);
  return d;
}

}  // namespace

Emotion KnnModel::predict(const Vector& x) const {
  if (x.size() != dimension()) {
    throw ParameterError("input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(dimension()));
  }
  return vote(nearest(points_, metric_, x, k_), labels_, k_);
}

KSelection select_k(const std::vector<features::FeatureVector>& train, const std::vector<std::size_t>& k_range,
                    std::size_t folds, const Metric& metric, std::uint64_t seed) {
  if (k_range.empty()) throw ParameterError("k range is empty");
  if (folds < 2) throw ParameterError("cross-validation needs at least two folds");
  if (train.size() < folds) throw ParameterError("fewer training vectors than folds");
  const auto fold_of = pso::stratified_folds(train, folds, seed);

  // per fold: sorted neighbour lists are shared by every k
  std::vector<std::size_t> misses(k_range.size(), 0);
  std::vector<char> usable(k_range.size(), 1);
  std::size_t evaluated = 0;
  KSelection out;
  std::size_t min_fold_train = train.size();
  for (std::size_t f = 0; f < folds; ++f) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < train.size(); ++i) n += fold_of[i] != f;
    min_fold_train = std::min(min_fold_train, n);
  }
  for (std::size_t ki = 0; ki < k_range.size(); ++ki) {
    if (k_range[ki] < 1 || k_range[ki] > min_fold_train) {
      usable[ki] = 0;
      out.warnings.push_back("k = " + std::to_string(k_range[ki]) + " skipped: outside [1, " +
                             std::to_string(min_fold_train) + "]");
    }
  }

  std::size_t k_max = 0;
  for (std::size_t ki = 0; ki < k_range.size(); ++ki) {
    if (usable[ki]) k_max = std::max(k_max, k_range[ki]);
  }
  for (std::size_t f = 0; f < folds && k_max > 0; ++f) {
    std::vector<Vector> points;
    std::vector<Emotion> labels;
    std::vector<const features::FeatureVector*> held;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (fold_of[i] == f) {
        held.push_back(&train[i]);
      } else {
        points.push_back(train[i].values);
        labels.push_back(train[i].label);
      }
    }
    // one neighbour ranking per held-out point serves every k
    for (const auto* v : held) {
      const auto sorted = nearest(points, metric, v->values, k_max);
      for (std::size_t ki = 0; ki < k_range.size(); ++ki) {
        if (usable[ki]) misses[ki] += vote(sorted, labels, k_range[ki]) != v->label;
      }
    }
    evaluated += held.size();
  }

  double best_loss = 2.0;
  for (std::size_t ki = 0; ki < k_range.size(); ++ki) {
    if (!usable[ki]) continue;
    const double loss = static_cast<double>(misses[ki]) / static_cast<double>(evaluated);
    out.loss_curve.emplace_back(k_range[ki], loss);
    if (loss < best_loss || (loss == best_loss && k_range[ki] < out.best_k)) {
      best_loss = loss;
      out.best_k = k_range[ki];
    }
  }
  if (out.loss_curve.empty()) throw ParameterError("no k in the range could be evaluated");
  return out;
}

}  // namespace ecgemo::knn
