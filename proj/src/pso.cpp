#include "ecgemo/pso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecgemo/error.hpp"

namespace ecgemo::pso {

void PsoConfig::validate() const {
  if (swarm_size < 1) throw ParameterError("swarm size must be at least 1");
  if (c1 < 0.0 || c2 < 0.0) throw ParameterError("learning factors must be non-negative");
  for (const auto& b : bounds) {
    if (!(b.hi > b.lo)) throw ParameterError("search bounds must satisfy lo < hi");
  }
  if (!(velocity_clamp > 0.0)) throw ParameterError("velocity clamp must be positive");
  if (cv_folds < 2) throw ParameterError("cross-validation needs at least two folds");
}

void step(std::vector<Particle>& swarm, const Position& global_best, const PsoConfig& config,
          const std::function<double()>& uniform) {
  for (auto& p : swarm) {
    for (std::size_t d = 0; d < 2; ++d) {
      const double r1 = uniform();
      const double r2 = uniform();
      const double range = config.bounds[d].hi - config.bounds[d].lo;
      const double vmax = config.velocity_clamp * range;
      double v = config.inertia * p.velocity[d] + config.c1 * r1 * (p.best_position[d] - p.position[d]) +
                 config.c2 * r2 * (global_best[d] - p.position[d]);
      v = std::clamp(v, -vmax, vmax);
      double x = p.position[d] + v;
      if (x < config.bounds[d].lo) {
        x = config.bounds[d].lo;
        v = 0.0;
      } else if (x > config.bounds[d].hi) {
        x = config.bounds[d].hi;
        v = 0.0;
      }
      p.velocity[d] = v;
      p.position[d] = x;
    }
  }
}

void step(std::vector<Particle>& swarm, const Position& global_best, const PsoConfig& config, Rng& rng) {
  step(swarm, global_best, config, [&rng] { return rng.uniform(); });
}

PsoResult optimize(const Fitness& fitness, const PsoConfig& config) {
  config.validate();
  Rng init(derive_seed(config.seed, tag("pso/init")));
  std::vector<Particle> swarm(config.swarm_size);
  for (auto& p : swarm) {
    for (std::size_t d = 0; d < 2; ++d) p.position[d] = init.uniform(config.bounds[d].lo, config.bounds[d].hi);
    p.velocity = {0.0, 0.0};
  }
  return optimize(fitness, config, std::move(swarm));
}

PsoResult optimize(const Fitness& fitness, const PsoConfig& config, std::vector<Particle> swarm) {
  config.validate();
  if (swarm.empty()) throw ParameterError("swarm must not be empty");
  PsoResult result;
  Rng rng(derive_seed(config.seed, tag("pso/step")));

  auto evaluate = [&](std::size_t iteration) {
    for (std::size_t k = 0; k < swarm.size(); ++k) {
      auto& p = swarm[k];
      const double f = fitness(p.position);
      if (iteration == 0 || f > p.best_fitness) {
        p.best_fitness = f;
        p.best_position = p.position;
      }
      // strict comparison keeps the lowest index on ties
      if (f > result.best_fitness) {
        result.best_fitness = f;
        result.best_position = p.position;
      }
      result.trace.push_back(TraceRow{iteration, k, p.position, f, result.best_fitness});
    }
    result.history.push_back(result.best_fitness);
  };

  evaluate(0);
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    step(swarm, result.best_position, config, rng);
    evaluate(it);
  }
  result.final_swarm = std::move(swarm);
  return result;
}

std::vector<std::size_t> stratified_folds(const std::vector<features::FeatureVector>& data, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw ParameterError("cross-validation needs at least two folds");
  std::vector<std::size_t> fold_of(data.size(), 0);
  Rng rng(seed);
  for (Emotion e : kAllEmotions) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].label == e) idx.push_back(i);
    }
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
    for (std::size_t i = 0; i < idx.size(); ++i) fold_of[idx[i]] = i % folds;
  }
  return fold_of;
}

double cv_accuracy(const std::vector<features::FeatureVector>& data, const std::vector<std::size_t>& fold_of,
                   std::size_t folds, const svm::SvmParams& params, std::uint64_t seed) {
  double total = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<features::FeatureVector> train;
    std::vector<const features::FeatureVector*> held;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold_of[i] == f) held.push_back(&data[i]);
      else train.push_back(data[i]);
    }
    const auto model = svm::train_multiclass(train, params, derive_seed(seed, f));
    std::size_t correct = 0;
    for (const auto* v : held) {
      if (svm::predict_multiclass(model, v->values) == v->label) ++correct;
    }
    total += held.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(held.size());
  }
  return total / static_cast<double>(folds);
}

TuneResult tune_svm(const std::vector<features::FeatureVector>& train, const PsoConfig& config,
                    const svm::SvmParams& base) {
  config.validate();
  std::array<std::size_t, kNumEmotions> per_class{};
  for (const auto& v : train) ++per_class[static_cast<std::size_t>(code(v.label))];
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    if (per_class[c] < config.cv_folds) {
      throw ParameterError("emotion " + std::string(name(static_cast<Emotion>(c))) + " has " +
                           std::to_string(per_class[c]) + " training vectors, fewer than " +
                           std::to_string(config.cv_folds) + " folds");
    }
  }

  // optional stratified subsample for the fitness evaluations
  std::vector<features::FeatureVector> sample;
  const std::vector<features::FeatureVector>* data = &train;
  if (config.max_samples > 0 && config.max_samples < train.size()) {
    Rng rng(derive_seed(config.seed, tag("pso/subsample")));
    const auto quota = features::balanced_quota(config.max_samples);
    for (Emotion e : kAllEmotions) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (train[i].label == e) idx.push_back(i);
      }
      const std::size_t want = std::min(idx.size(), std::max(quota[static_cast<std::size_t>(code(e))], config.cv_folds));
      for (std::size_t i = 0; i < want; ++i) {
        std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
        sample.push_back(train[idx[i]]);
      }
    }
    data = &sample;
  }

  const auto fold_of = stratified_folds(*data, config.cv_folds, derive_seed(config.seed, tag("pso/folds")));
  const std::uint64_t svm_seed = derive_seed(config.seed, tag("pso/svm"));
  const Fitness fitness = [&](const Position& p) {
    svm::SvmParams params = base;
    params.c = std::pow(10.0, p[0]);
    params.gamma = std::pow(10.0, p[1]);
    return cv_accuracy(*data, fold_of, config.cv_folds, params, svm_seed);
  };

  TuneResult out;
  out.search = optimize(fitness, config);
  out.c = std::pow(10.0, out.search.best_position[0]);
  out.gamma = std::pow(10.0, out.search.best_position[1]);
  out.fitness = out.search.best_fitness;
  return out;
}

}  // namespace ecgemo::pso
