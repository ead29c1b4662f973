#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecgemo/config.hpp"
#include "ecgemo/eval.hpp"
#include "ecgemo/features.hpp"
#include "ecgemo/io.hpp"
#include "ecgemo/pso.hpp"
#include "ecgemo/signal.hpp"

/// End-to-end stages: synth -> filter -> segment -> extract -> tune -> train -> evaluate -> sweep.
///
/// Seed derivation from the master seed m (derive_seed / tag from random.hpp):
///   record (subject s, emotion e):  clean  = derive(derive(m, "synth"), 16 s + e)
///                                   noise  = derive(derive(m, "noise"), 16 s + e)
///   run k:                          r      = eval::run_seed(m, k)
///     dataset sampling              derive(r, "dataset")
///     PSO search                    derive(r, "pso")
///     classifier training           derive(r, "train")
///     k selection folds             derive(r, "select_k")
namespace ecgemo::pipeline {

/// subjects x 4 emotions records with noise injected, ordered by subject then emotion code.
std::vector<SignalRecord> synthesize(const PipelineConfig& config);

dsp::FirFilter make_filter(const PipelineConfig& config);

/// Applies the configured filter (or returns the input when apply_filter is off).
std::vector<SignalRecord> preprocess(const PipelineConfig& config, const std::vector<SignalRecord>& records);

/// Every segment of every record transformed to `feature_count` DCT coefficients.
std::vector<features::FeatureVector> feature_pool(const PipelineConfig& config,
                                                  const std::vector<SignalRecord>& records,
                                                  std::size_t feature_count);

/// Keeps the first n values of each vector.
std::vector<features::FeatureVector> truncate(const std::vector<features::FeatureVector>& pool, std::size_t n);

features::AssembleOptions assemble_options(const PipelineConfig& config, std::uint64_t seed);

/// Class-balanced split sampled from a pool (standardised when configured).
features::Dataset make_dataset(const PipelineConfig& config, const std::vector<features::FeatureVector>& pool,
                               std::uint64_t seed);

pso::PsoConfig pso_config(const PipelineConfig& config, std::uint64_t seed);

struct TrainedModel {
  io::Model model;
  std::optional<pso::TuneResult> tuning;
};

/// Trains the configured classifier; the SVM is PSO-tuned first when svm_tune is set.
TrainedModel train(const PipelineConfig& config, ClassifierKind kind,
                   const std::vector<features::FeatureVector>& train_set, std::uint64_t seed);

std::vector<Emotion> predict_all(const io::Model& model, const std::vector<features::FeatureVector>& data);

eval::ConfusionMatrix evaluate(const io::Model& model, const std::vector<features::FeatureVector>& test_set);

/// One protocol run: sample a split, train, and score on the test split.
eval::ConfusionMatrix run_once(const PipelineConfig& config, ClassifierKind kind,
                               const std::vector<features::FeatureVector>& pool, std::uint64_t run_seed);

/// config.runs repetitions of run_once.
eval::RecognitionReport evaluate_repeated(const PipelineConfig& config, ClassifierKind kind,
                                          const std::vector<features::FeatureVector>& pool);

/// Mean recognition rate against feature count, using config.classifier.
eval::Curve sweep_features(const PipelineConfig& config, const std::vector<SignalRecord>& records);

/// Forest mean rate and mean test-set generalization error against tree count.
eval::Curve sweep_trees(const PipelineConfig& config, const std::vector<features::FeatureVector>& pool,
                        const std::vector<long>& tree_counts);
eval::Curve sweep_trees(const PipelineConfig& config, const std::vector<features::FeatureVector>& pool);

/// K-NN mean test rate and mean cross-validated loss against k.
eval::Curve sweep_k(const PipelineConfig& config, const std::vector<features::FeatureVector>& pool);

}  // namespace ecgemo::pipeline
