#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ecgemo/features.hpp"
#include "ecgemo/random.hpp"
#include "ecgemo/svm.hpp"

namespace ecgemo::pso {

/// A point in the search space: (log10 C, log10 gamma) when tuning the SVM.
using Position = std::array<double, 2>;

struct Bounds {
  double lo;
  double hi;
};

struct Particle {
  Position position{};
  Position velocity{};
  Position best_position{};
  double best_fitness = -1e300;
};

struct PsoConfig {
  std::size_t swarm_size = 20;
  std::size_t iterations = 30;
  double c1 = 2.0;
  double c2 = 2.0;
  double inertia = 1.0;
  std::array<Bounds, 2> bounds{{{-1.0, 3.0}, {-4.0, 1.0}}};
  /// Per-axis velocity limit as a fraction of the axis range.
  double velocity_clamp = 0.5;
  std::uint64_t seed = 0;
  std::size_t cv_folds = 5;
  /// Fitness is computed on a stratified subsample of at most this many
  /// training vectors; 0 uses the whole training split.
  std::size_t max_samples = 0;

  void validate() const;
};

/// One update of every particle:
///   v <- inertia*v + c1*r1*(pbest - x) + c2*r2*(gbest - x), clamped to +-velocity limit
///   x <- x + v, clamped to bounds with the velocity zeroed on a clamped axis.
/// `uniform` supplies r1, r2 per particle per axis in the order r1[0], r2[0], r1[1], r2[1].
void step(std::vector<Particle>& swarm, const Position& global_best, const PsoConfig& config,
          const std::function<double()>& uniform);
void step(std::vector<Particle>& swarm, const Position& global_best, const PsoConfig& config, Rng& rng);

/// One evaluated particle position, for the tuning trace.
struct TraceRow {
  std::size_t iteration;
  std::size_t particle;
  Position position;
  double fitness;
  double global_best_fitness;
};

struct PsoResult {
  Position best_position{};
  double best_fitness = -1e300;
  /// Global-best fitness after initialisation (index 0) and after each iteration.
  std::vector<double> history;
  std::vector<TraceRow> trace;
  std::vector<Particle> final_swarm;
};

using Fitness = std::function<double(const Position&)>;

/// Maximises `fitness`. Particles start uniformly inside the bounds at rest;
/// ties for the global best go to the lowest particle index.
PsoResult optimize(const Fitness& fitness, const PsoConfig& config);

/// Same, with caller-provided initial particles.
PsoResult optimize(const Fitness& fitness, const PsoConfig& config, std::vector<Particle> initial);

/// Stratified k-fold assignment: each class is shuffled and dealt round-robin.
std::vector<std::size_t> stratified_folds(const std::vector<features::FeatureVector>& data, std::size_t folds,
                                          std::uint64_t seed);

/// Mean k-fold accuracy of a multiclass SVM at (C, gamma).
double cv_accuracy(const std::vector<features::FeatureVector>& data, const std::vector<std::size_t>& fold_of,
                   std::size_t folds, const svm::SvmParams& params, std::uint64_t seed);

struct TuneResult {
  double c = 0.0;
  double gamma = 0.0;
  double fitness = 0.0;
  PsoResult search;
};

/// PSO over (log10 C, log10 gamma) with cross-validated accuracy on the training split as fitness.
/// Throws ParameterError if a class has fewer vectors than folds.
TuneResult tune_svm(const std::vector<features::FeatureVector>& train, const PsoConfig& config,
                    const svm::SvmParams& base = {});

}  // namespace ecgemo::pso
