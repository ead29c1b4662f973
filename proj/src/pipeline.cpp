#include "ecgemo/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ecgemo/error.hpp"
#include "ecgemo/random.hpp"

namespace ecgemo::pipeline {

std::vector<SignalRecord> synthesize(const PipelineConfig& config) {
  config.validate();
  const std::uint64_t clean_root = derive_seed(config.seed, tag("synth"));
  const std::uint64_t noise_root = derive_seed(config.seed, tag("noise"));
  std::vector<SignalRecord> out;
  for (int s = 1; s <= config.subjects; ++s) {
    for (Emotion e : kAllEmotions) {
      const auto stream = static_cast<std::uint64_t>(16 * s + code(e));
      const auto clean = synth::generate_clean(config.profiles[static_cast<std::size_t>(code(e))], e, s,
                                               config.duration_s, config.sample_rate_hz,
                                               derive_seed(clean_root, stream));
      synth::NoiseSpec noise = config.noise;
      noise.seed = derive_seed(noise_root, stream);
      out.push_back(synth::inject_noise(clean, noise));
    }
  }
  return out;
}

dsp::FirFilter make_filter(const PipelineConfig& config) {
  return dsp::design_bandpass(config.low_cut_hz, config.high_cut_hz, config.sample_rate_hz, config.fir_taps,
                              config.fir_window);
}

std::vector<SignalRecord> preprocess(const PipelineConfig& config, const std::vector<SignalRecord>& records) {
  if (!config.apply_filter) return records;
  const auto filter = make_filter(config);
  std::vector<SignalRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(dsp::apply(filter, r));
  return out;
}

std::vector<features::FeatureVector> feature_pool(const PipelineConfig& config,
                                                  const std::vector<SignalRecord>& records,
                                                  std::size_t feature_count) {
  const features::DctPlan plan(config.segment_length, feature_count);
  std::vector<features::FeatureVector> pool;
  for (const auto& r : records) {
    for (const auto& seg : dsp::segment(r, config.segment_length, config.segment_stride)) {
      pool.push_back(features::extract(seg, plan));
    }
  }
  return pool;
}

std::vector<features::FeatureVector> truncate(const std::vector<features::FeatureVector>& pool, std::size_t n) {
  std::vector<features::FeatureVector> out;
  out.reserve(pool.size());
  for (const auto& v : pool) {
    if (n > v.values.size()) throw ParameterError("cannot truncate feature vectors to a larger size");
    out.push_back({std::vector<double>(v.values.begin(), v.values.begin() + static_cast<long>(n)), v.label, v.source});
  }
  return out;
}

features::AssembleOptions assemble_options(const PipelineConfig& config, std::uint64_t seed) {
  features::AssembleOptions o;
  o.segment_length = config.segment_length;
  o.stride = config.segment_stride;
  o.feature_count = config.feature_count;
  o.train_subjects = std::set<int>(config.train_subjects.begin(), config.train_subjects.end());
  o.test_subjects = std::set<int>(config.test_subjects.begin(), config.test_subjects.end());
  o.train_size = config.train_size;
  o.test_size = config.test_size;
  o.seed = seed;
  return o;
}

features::Dataset make_dataset(const PipelineConfig& config, const std::vector<features::FeatureVector>& pool,
                               std::uint64_t seed) {
  auto options = assemble_options(config, seed);
  if (!pool.empty()) options.feature_count = pool.front().values.size();
  auto ds = features::assemble_from_pool(pool, options);
  if (config.standardize) features::standardize(ds);
  return ds;
}

pso::PsoConfig pso_config(const PipelineConfig& config, std::uint64_t seed) {
  pso::PsoConfig p = config.pso;
  p.seed = seed;
  return p;
}

TrainedModel train(const PipelineConfig& config, ClassifierKind kind,
                   const std::vector<features::FeatureVector>& train_set, std::uint64_t seed) {
  switch (kind) {
    case ClassifierKind::Svm: {
      svm::SvmParams params = config.svm;
      std::optional<pso::TuneResult> tuning;
      if (config.svm_tune) {
        tuning = pso::tune_svm(train_set, pso_config(config, derive_seed(seed, tag("pso"))), params);
        params.c = tuning->c;
        params.gamma = tuning->gamma;
      }
      return {svm::train_multiclass(train_set, params, derive_seed(seed, tag("train"))), std::move(tuning)};
    }
    case ClassifierKind::Forest:
      return {forest::train_forest(train_set, config.forest, derive_seed(seed, tag("train"))), std::nullopt};
    case ClassifierKind::Knn:
      return {knn::KnnModel(train_set, config.knn_k, config.knn_metric), std::nullopt};
  }
  throw UsageError("unknown classifier");
}

std::vector<Emotion> predict_all(const io::Model& model, const std::vector<features::FeatureVector>& data) {
  std::vector<Emotion> out;
  out.reserve(data.size());
  for (const auto& v : data) out.push_back(io::predict(model, v.values));
  return out;
}

eval::ConfusionMatrix evaluate(const io::Model& model, const std::vector<features::FeatureVector>& test_set) {
  std::vector<Emotion> truth;
  truth.reserve(test_set.size());
  for (const auto& v : test_set) truth.push_back(v.label);
  return eval::confusion(truth, predict_all(model, test_set));
}

eval::ConfusionMatrix run_once(const PipelineConfig& config, ClassifierKind kind,
                               const std::vector<features::FeatureVector>& pool, std::uint64_t run_seed) {
  const auto ds = make_dataset(config, pool, derive_seed(run_seed, tag("dataset")));
  const auto trained = train(config, kind, ds.train, run_seed);
  return evaluate(trained.model, ds.test);
}

eval::RecognitionReport evaluate_repeated(const PipelineConfig& config, ClassifierKind kind,
                                          const std::vector<features::FeatureVector>& pool) {
  return eval::run_repeated(
      std::string(to_string(kind)), [&](std::uint64_t seed) { return run_once(config, kind, pool, seed); },
      config.runs, config.seed, config.weighted_average);
}

eval::Curve sweep_features(const PipelineConfig& config, const std::vector<SignalRecord>& records) {
  const auto values = eval::parameter_range(config.sweep_features.lo, config.sweep_features.hi, config.sweep_features.step);
  const auto max_n = static_cast<std::size_t>(*std::max_element(values.begin(), values.end()));
  if (max_n > config.segment_length) throw ParameterError("feature count exceeds segment length");
  // DCT prefixes are exact, so one transform at the largest count serves every point
  const auto full = feature_pool(config, records, max_n);
  return eval::sweep("features", values, config.runs, config.seed, [&](long n, std::uint64_t seed) {
    const auto pool = truncate(full, static_cast<std::size_t>(n));
    const auto cm = run_once(config, config.classifier, pool, seed);
    return std::pair{eval::average_rate(cm, config.weighted_average), std::optional<double>{}};
  });
}

eval::Curve sweep_trees(const PipelineConfig& config, const std::vector<features::FeatureVector>& pool,
                        const std::vector<long>& tree_counts) {
  const long max_trees = *std::max_element(tree_counts.begin(), tree_counts.end());
  if (max_trees < 1) throw ParameterError("tree counts must be positive");
  struct Cached {
    forest::ForestModel model;
    features::Dataset data;
  };
  // prefix stability: grow the largest forest once per run and score its prefixes
  std::map<std::uint64_t, Cached> cache;
  return eval::sweep(
      "trees", tree_counts, config.runs, config.seed,
      [&](long trees, std::uint64_t seed) {
        auto it = cache.find(seed);
        if (it == cache.end()) {
          auto ds = make_dataset(config, pool, derive_seed(seed, tag("dataset")));
          forest::ForestParams params = config.forest;
          params.num_trees = static_cast<std::size_t>(max_trees);
          auto model = forest::train_forest(ds.train, params, derive_seed(seed, tag("train")));
          it = cache.emplace(seed, Cached{std::move(model), std::move(ds)}).first;
        }
        const auto model = it->second.model.prefix(static_cast<std::size_t>(trees));
        const auto cm = evaluate(model, it->second.data.test);
        return std::pair{eval::average_rate(cm, config.weighted_average),
                         std::optional<double>{forest::generalization_error(model, it->second.data.test)}};
      },
      "generalization_error");
}

eval::Curve sweep_trees(const PipelineConfig& config, const std::vector<features::FeatureVector>& pool) {
  return sweep_trees(config, pool,
                     eval::parameter_range(config.sweep_trees.lo, config.sweep_trees.hi, config.sweep_trees.step));
}

eval::Curve sweep_k(const PipelineConfig& config, const std::vector<features::FeatureVector>& pool) {
  const auto values = eval::parameter_range(config.sweep_k.lo, config.sweep_k.hi, config.sweep_k.step);
  std::vector<std::size_t> ks(values.begin(), values.end());
  struct Cached {
    features::Dataset data;
    std::map<std::size_t, double> cv_loss;
  };
  std::map<std::uint64_t, Cached> cache;
  return eval::sweep(
      "k", values, config.runs, config.seed,
      [&](long k, std::uint64_t seed) {
        auto it = cache.find(seed);
        if (it == cache.end()) {
          Cached c{make_dataset(config, pool, derive_seed(seed, tag("dataset"))), {}};
          const auto sel = knn::select_k(c.data.train, ks, config.knn_folds, config.knn_metric,
                                         derive_seed(seed, tag("select_k")));
          for (const auto& [kk, loss] : sel.loss_curve) c.cv_loss[kk] = loss;
          it = cache.emplace(seed, std::move(c)).first;
        }
        const knn::KnnModel model(it->second.data.train, static_cast<std::size_t>(k), config.knn_metric);
        const auto cm = evaluate(model, it->second.data.test);
        std::optional<double> loss;
        if (auto f = it->second.cv_loss.find(static_cast<std::size_t>(k)); f != it->second.cv_loss.end()) loss = f->second;
        return std::pair{eval::average_rate(cm, config.weighted_average), loss};
      },
      "cv_loss");
}

}  // namespace ecgemo::pipeline
