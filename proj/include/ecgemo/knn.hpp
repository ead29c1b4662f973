#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecgemo/emotion.hpp"
#include "ecgemo/features.hpp"

namespace ecgemo::knn {

using Vector = std::vector<double>;

enum class MetricKind { Euclidean, Cosine, Minkowski, ChiSquare };

struct Metric {
  MetricKind kind = MetricKind::Euclidean;
  double p = 2.0;  // Minkowski order

  static Metric euclidean() { return {MetricKind::Euclidean, 2.0}; }
  static Metric cosine() { return {MetricKind::Cosine, 2.0}; }
  static Metric minkowski(double p) { return {MetricKind::Minkowski, p}; }
  static Metric chi_square() { return {MetricKind::ChiSquare, 2.0}; }
};

/// "euclidean", "cosine", "chisquare", "minkowski:3".
std::string to_string(const Metric& m);
Metric parse_metric(std::string_view text);

inline constexpr double kChiSquareEpsilon = 1e-12;

/// Euclidean, cosine (1 - cos angle), Minkowski, or chi-square with
/// denominator |x_i| + |y_i| + eps so signed coordinates are allowed.
double distance(const Metric& metric, const Vector& x, const Vector& y);

class KnnModel {
public:
  /// Throws ParameterError unless 1 <= k <= points.size() and Minkowski p >= 1.
  KnnModel(std::vector<Vector> points, std::vector<Emotion> labels, std::size_t k, Metric metric);
  KnnModel(const std::vector<features::FeatureVector>& train, std::size_t k, Metric metric);

  /// Plurality among the k nearest points. Distance ties at the k-th rank go
  /// to the lower training index; label ties to the smaller summed distance,
  /// then to the lower class code.
  Emotion predict(const Vector& x) const;

  const std::vector<Vector>& points() const noexcept { return points_; }
  const std::vector<Emotion>& labels() const noexcept { return labels_; }
  std::size_t k() const noexcept { return k_; }
  const Metric& metric() const noexcept { return metric_; }
  std::size_t dimension() const { return points_.front().size(); }

private:
  std::vector<Vector> points_;
  std::vector<Emotion> labels_;
  std::size_t k_;
  Metric metric_;
};

inline Emotion predict_knn(const KnnModel& model, const Vector& x) { return model.predict(x); }

struct KSelection {
  std::size_t best_k = 0;
  /// (k, cross-validated misclassification rate) for every k that was evaluated.
  std::vector<std::pair<std::size_t, double>> loss_curve;
  std::vector<std::string> warnings;
};

/// Stratified k-fold CV loss per candidate k; argmin with ties to the smaller k.
/// A k larger than some fold's training size is skipped with a warning.
KSelection select_k(const std::vector<features::FeatureVector>& train, const std::vector<std::size_t>& k_range,
                    std::size_t folds, const Metric& metric, std::uint64_t seed);

}  // namespace ecgemo::knn
