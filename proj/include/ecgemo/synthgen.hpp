#pragma once

#include <cstdint>

#include "ecgemo/emotion.hpp"
#include "ecgemo/signal.hpp"

namespace ecgemo::synth {

/// Heart-rate statistics and waveform scaling for one emotion.
struct EmotionProfile {
  double mean_hr_bpm = 75.0;
  double hr_std_bpm = 0.0;
  double qrs_amp_scale = 1.0;
  double t_amp_scale = 1.0;

  /// Throws ParameterError when a field is out of range.
  void validate() const;
};

/// Built-in profile for an emotion (Calm slowest, Exciting fastest).
EmotionProfile default_profile(Emotion e);

/// Additive interference. Each component draws from its own sub-seed of `seed`,
/// so components can be injected together or one after another with identical results.
struct NoiseSpec {
  double baseline_drift_amp = 0.0;
  double baseline_drift_hz = 0.3;
  double powerline_amp = 0.0;
  double powerline_hz = 50.0;
  double emg_amp = 0.0;  // RMS of the band-limited noise
  double emg_low_hz = 20.0;
  double emg_high_hz = 60.0;
  double electrode_amp = 0.0;  // RMS of the band-limited noise
  double electrode_low_hz = 1.0;
  double electrode_high_hz = 10.0;
  std::uint64_t seed = 0;

  void validate(double sample_rate_hz) const;
};

/// Noise levels used by the pipeline when nothing is configured.
NoiseSpec default_noise(std::uint64_t seed);

/// Sum-of-Gaussians PQRST train with normally distributed beat-to-beat heart rate.
SignalRecord generate_clean(const EmotionProfile& profile, Emotion label, int subject_id, double duration_s,
                            double sample_rate_hz, std::uint64_t seed);

SignalRecord inject_noise(const SignalRecord& record, const NoiseSpec& spec);

}  // namespace ecgemo::synth
