#pragma once

#include <vector>

#include "ecgemo/emotion.hpp"

namespace ecgemo {

/// A uniformly sampled ECG trace (millivolts) with its emotion label and subject.
class SignalRecord {
public:
  /// Throws ParameterError if `samples` is empty or `sample_rate_hz` is not positive.
  SignalRecord(std::vector<double> samples, double sample_rate_hz, Emotion label, int subject_id);

  const std::vector<double>& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  Emotion label() const noexcept { return label_; }
  int subject_id() const noexcept { return subject_id_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration_s() const noexcept { return static_cast<double>(samples_.size()) / sample_rate_hz_; }

  /// Same metadata, new samples (length may differ but must be non-empty).
  SignalRecord with_samples(std::vector<double> samples) const;

  friend bool operator==(const SignalRecord&, const SignalRecord&) = default;

private:
  std::vector<double> samples_;
  double sample_rate_hz_;
  Emotion label_;
  int subject_id_;
};

}  // namespace ecgemo
