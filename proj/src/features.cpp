#include "ecgemo/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "ecgemo/error.hpp"
#include "ecgemo/random.hpp"

namespace ecgemo::features {
namespace {

constexpr double kPi = std::numbers::pi;

double dct_weight(std::size_t k, std::size_t n) {
  return k == 0 ? std::sqrt(1.0 / static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n));
}

// cos(pi (2i+1) k / 2N) with the argument reduced modulo 4N so large k*i stay exact.
double basis_cos(std::size_t k, std::size_t i, std::size_t n) {
  const std::size_t period = 4 * n;
  const std::size_t m = ((2 * i + 1) * k) % period;
  return std::cos(kPi * static_cast<double>(m) / static_cast<double>(2 * n));
}

}  // namespace

std::vector<double> dct(const std::vector<double>& x) {
  if (x.empty()) throw ParameterError("dct of an empty sequence");
  return DctPlan(x.size(), x.size()).forward(x);
}

std::vector<double> idct(const std::vector<double>& y) {
  if (y.empty()) throw ParameterError("idct of an empty sequence");
  const std::size_t n = y.size();
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double wk = dct_weight(k, n) * y[k];
    for (std::size_t i = 0; i < n; ++i) x[i] += wk * basis_cos(k, i, n);
  }
  return x;
}

DctPlan::DctPlan(std::size_t length, std::size_t rows) : length_(length), rows_(rows) {
  if (length == 0) throw ParameterError("dct length must be positive");
  if (rows == 0 || rows > length) throw ParameterError("dct row count must lie in [1, length]");
  basis_.resize(rows * length);
  for (std::size_t k = 0; k < rows; ++k) {
    const double w = dct_weight(k, length);
    for (std::size_t i = 0; i < length; ++i) basis_[k * length + i] = w * basis_cos(k, i, length);
  }
}

std::vector<double> DctPlan::forward(const std::vector<double>& x) const {
  if (x.size() != length_) throw ParameterError("dct input length does not match the plan");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t k = 0; k < rows_; ++k) {
    const double* row = &basis_[k * length_];
    double acc = 0.0;
    for (std::size_t i = 0; i < length_; ++i) acc += row[i] * x[i];
    y[k] = acc;
  }
  return y;
}

FeatureVector extract(const dsp::Segment& segment, std::size_t n) {
  if (n < 1 || n > segment.samples.size()) {
    throw ParameterError("feature count " + std::to_string(n) + " must lie in [1, segment length " +
                         std::to_string(segment.samples.size()) + "]");
  }
  return extract(segment, DctPlan(segment.samples.size(), n));
}

FeatureVector extract(const dsp::Segment& segment, const DctPlan& plan) {
  return FeatureVector{plan.forward(segment.samples), segment.label, segment.source};
}

std::vector<std::size_t> balanced_quota(std::size_t size) {
  std::vector<std::size_t> quota(kNumEmotions, size / kNumEmotions);
  for (std::size_t i = 0; i < size % kNumEmotions; ++i) ++quota[i];
  return quota;
}

namespace {

std::vector<FeatureVector> sample_split(const std::vector<const FeatureVector*>& candidates, std::size_t size,
                                        const char* split, Rng& rng, std::vector<std::string>& warnings) {
  std::vector<std::vector<const FeatureVector*>> by_class(kNumEmotions);
  for (const FeatureVector* v : candidates) by_class[static_cast<std::size_t>(code(v->label))].push_back(v);

  const auto quota = balanced_quota(size);
  std::vector<FeatureVector> out;
  out.reserve(size);
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    auto& pool = by_class[c];
    const std::size_t want = quota[c];
    if (want == 0) continue;
    if (pool.empty()) {
      throw ParameterError(std::string(split) + " split has no segments for emotion " +
                           std::string(name(static_cast<Emotion>(c))));
    }
    if (pool.size() >= want) {
      // partial Fisher-Yates
      for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + rng.index(pool.size() - i);
        std::swap(pool[i], pool[j]);
        out.push_back(*pool[i]);
      }
    } else {
      warnings.push_back(std::string(split) + " split: " + std::string(name(static_cast<Emotion>(c))) + " has " +
                         std::to_string(pool.size()) + " segments for a quota of " + std::to_string(want) +
                         "; sampling with replacement");
      for (std::size_t i = 0; i < want; ++i) out.push_back(*pool[rng.index(pool.size())]);
    }
  }
  // interleave classes so downstream consumers never see label-sorted input
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.index(i)]);
  return out;
}

}  // namespace

Dataset assemble_from_pool(const std::vector<FeatureVector>& pool, const AssembleOptions& options) {
  for (int s : options.train_subjects) {
    if (options.test_subjects.count(s)) {
      throw ParameterError("subject " + std::to_string(s) + " is in both the train and test sets");
    }
  }
  std::vector<const FeatureVector*> train_candidates, test_candidates;
  for (const auto& v : pool) {
    if (options.train_subjects.count(v.source.subject_id)) train_candidates.push_back(&v);
    else if (options.test_subjects.count(v.source.subject_id)) test_candidates.push_back(&v);
  }
  Dataset ds;
  ds.feature_count = options.feature_count;
  Rng train_rng(derive_seed(options.seed, tag("assemble/train")));
  Rng test_rng(derive_seed(options.seed, tag("assemble/test")));
  ds.train = sample_split(train_candidates, options.train_size, "train", train_rng, ds.warnings);
  ds.test = sample_split(test_candidates, options.test_size, "test", test_rng, ds.warnings);
  return ds;
}

Dataset assemble(const std::vector<SignalRecord>& records, const AssembleOptions& options) {
  if (options.feature_count < 1 || options.feature_count > options.segment_length) {
    throw ParameterError("feature count must lie in [1, segment length]");
  }
  const DctPlan plan(options.segment_length, options.feature_count);
  std::vector<FeatureVector> pool;
  for (const auto& r : records) {
    if (!options.train_subjects.count(r.subject_id()) && !options.test_subjects.count(r.subject_id())) continue;
    for (const auto& seg : dsp::segment(r, options.segment_length, options.stride)) {
      pool.push_back(extract(seg, plan));
    }
  }
  return assemble_from_pool(pool, options);
}

void standardize(Dataset& dataset) {
  if (dataset.train.empty()) throw ParameterError("cannot standardize without training data");
  const std::size_t d = dataset.train.front().values.size();
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (const auto& v : dataset.train) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += v.values[j];
  }
  const auto n = static_cast<double>(dataset.train.size());
  for (double& m : mean) m /= n;
  for (const auto& v : dataset.train) {
    for (std::size_t j = 0; j < d; ++j) sd[j] += (v.values[j] - mean[j]) * (v.values[j] - mean[j]);
  }
  for (double& s : sd) {
    s = std::sqrt(s / n);
    if (s == 0.0) s = 1.0;
  }
  auto apply = [&](std::vector<FeatureVector>& split) {
    for (auto& v : split) {
      for (std::size_t j = 0; j < d; ++j) v.values[j] = (v.values[j] - mean[j]) / sd[j];
    }
  };
  apply(dataset.train);
  apply(dataset.test);
}

void check_dimensions(const std::vector<FeatureVector>& vectors, std::size_t expected) {
  for (const auto& v : vectors) {
    if (v.values.size() != expected) {
      throw ParameterError("feature vector of length " + std::to_string(v.values.size()) + ", expected " +
                           std::to_string(expected));
    }
  }
}

}  // namespace ecgemo::features
