#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ecgemo/emotion.hpp"
#include "ecgemo/features.hpp"

namespace ecgemo::svm {

using Vector = std::vector<double>;

struct SvmParams {
  double c = 1.0;
  double gamma = 0.01;
  double tolerance = 1e-3;
  /// Cap on pair updates; 0 selects max(10 * n, 100000).
  std::size_t max_passes = 0;

  void validate() const;
};

/// exp(-gamma * ||x - y||^2). Throws ParameterError on length mismatch or gamma <= 0.
double rbf_kernel(const Vector& x, const Vector& y, double gamma);

/// Kernel expansion f(x) = sum_i coef_i k(sv_i, x) + bias; coef_i = alpha_i * y_i.
struct BinarySvmModel {
  std::vector<Vector> support_vectors;
  std::vector<double> dual_coefs;
  double bias = 0.0;
  SvmParams params;
  /// Training-set index of each support vector. Empty for models loaded from disk.
  std::vector<std::size_t> sv_indices;
  std::size_t iterations = 0;
  bool converged = false;

  bool trained() const noexcept { return !support_vectors.empty(); }
  std::size_t dimension() const { return support_vectors.empty() ? 0 : support_vectors.front().size(); }
};

/// Pairwise dual coordinate ascent (two multipliers per step, analytic clip to
/// [0, C]). The first multiplier is the maximal KKT violator, the second is
/// the partner with the largest objective gain; exact ties go to the earlier
/// index of a seed-derived scan order. Labels must be +1 / -1.
BinarySvmModel train_binary(const std::vector<Vector>& x, const std::vector<int>& y, const SvmParams& params,
                            std::uint64_t seed);

/// Raw decision value. Throws UsageError on an untrained model, ParameterError on dimension mismatch.
double predict_binary(const BinarySvmModel& model, const Vector& x);

/// sum alpha - 1/2 sum_ij coef_i coef_j k(sv_i, sv_j).
double dual_objective(const BinarySvmModel& model);

/// Largest KKT residual over the training set the model was fitted on
/// (alpha = 0: 1 - y f; alpha = C: y f - 1; free: |y f - 1|; clipped at 0).
double max_kkt_violation(const BinarySvmModel& model, const std::vector<Vector>& x, const std::vector<int>& y);

/// Multiplier alpha_i for every training point (0 for non-support vectors).
std::vector<double> training_alphas(const BinarySvmModel& model, std::size_t n);

struct PairModel {
  Emotion positive;  // lower class code, decision >= 0
  Emotion negative;
  BinarySvmModel model;
};

/// One-vs-one ensemble: one binary model per unordered emotion pair.
struct MulticlassSvmModel {
  std::vector<PairModel> pairs;
  SvmParams params;
};

/// Throws ParameterError if any emotion is missing from `train`.
MulticlassSvmModel train_multiclass(const std::vector<features::FeatureVector>& train, const SvmParams& params,
                                    std::uint64_t seed);

std::array<int, kNumEmotions> votes(const MulticlassSvmModel& model, const Vector& x);
/// Most votes; ties go to the lowest class code.
Emotion resolve_vote(const std::array<int, kNumEmotions>& counts);
Emotion predict_multiclass(const MulticlassSvmModel& model, const Vector& x);

}  // namespace ecgemo::svm
