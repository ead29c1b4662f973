#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ecgemo/dsp.hpp"
#include "ecgemo/emotion.hpp"
#include "ecgemo/signal.hpp"

namespace ecgemo::features {

/// Orthonormal DCT-II:
///   y(k) = w(k) * sum_{n=1..N} x(n) cos(pi (2n-1)(k-1) / 2N),
///   w(1) = 1/sqrt(N), w(k) = sqrt(2/N) for k >= 2.
/// Throws ParameterError on empty input.
std::vector<double> dct(const std::vector<double>& x);

/// Inverse of dct (DCT-III with the same scaling).
std::vector<double> idct(const std::vector<double>& y);

/// Precomputed leading rows of the DCT basis for a fixed length. Computing
/// only the first `rows` coefficients costs rows*N per segment.
class DctPlan {
public:
  DctPlan(std::size_t length, std::size_t rows);

  std::size_t length() const noexcept { return length_; }
  std::size_t rows() const noexcept { return rows_; }
  std::vector<double> forward(const std::vector<double>& x) const;

private:
  std::size_t length_;
  std::size_t rows_;
  std::vector<double> basis_;  // rows_ x length_, row-major, scaling folded in
};

struct FeatureVector {
  std::vector<double> values;
  Emotion label = Emotion::Happy;
  dsp::Provenance source;
};

/// First n DCT coefficients of the segment in natural order.
FeatureVector extract(const dsp::Segment& segment, std::size_t n);
FeatureVector extract(const dsp::Segment& segment, const DctPlan& plan);

struct Dataset {
  std::vector<FeatureVector> train;
  std::vector<FeatureVector> test;
  std::size_t feature_count = 0;
  std::vector<std::string> warnings;
};

struct AssembleOptions {
  std::size_t segment_length = 256;
  std::size_t stride = 256;
  std::size_t feature_count = 75;
  std::set<int> train_subjects;
  std::set<int> test_subjects;
  std::size_t train_size = 4000;
  std::size_t test_size = 1200;
  std::uint64_t seed = 0;
};

/// Per-emotion quota: size / 4 each, the remainder going to the lowest codes.
std::vector<std::size_t> balanced_quota(std::size_t size);

/// Segments, transforms and samples a class-balanced train/test split.
/// Sampling is without replacement when a class has enough segments and with
/// replacement (plus a warning) otherwise.
Dataset assemble(const std::vector<SignalRecord>& records, const AssembleOptions& options);

/// Lower-level entry used by the pipeline: assemble from precomputed segment features.
/// `pool` holds every candidate vector; subjects select the split.
Dataset assemble_from_pool(const std::vector<FeatureVector>& pool, const AssembleOptions& options);

/// z-score each feature using train-split statistics; applied to both splits.
void standardize(Dataset& dataset);

/// Throws ParameterError if vectors disagree in length.
void check_dimensions(const std::vector<FeatureVector>& vectors, std::size_t expected);

}  // namespace ecgemo::features
