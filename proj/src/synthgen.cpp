#include "ecgemo/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ecgemo/dsp.hpp"
#include "ecgemo/error.hpp"
#include "ecgemo/random.hpp"

namespace ecgemo {

SignalRecord::SignalRecord(std::vector<double> samples, double sample_rate_hz, Emotion label, int subject_id)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz), label_(label), subject_id_(subject_id) {
  if (samples_.empty()) throw ParameterError("signal record must have at least one sample");
  if (!(sample_rate_hz_ > 0.0)) throw ParameterError("sample rate must be positive");
}

SignalRecord SignalRecord::with_samples(std::vector<double> samples) const {
  return SignalRecord(std::move(samples), sample_rate_hz_, label_, subject_id_);
}

namespace synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// One Gaussian bump of the beat template: offset from the R peak (s), amplitude (mV), width (s).
struct Wave {
  double offset_s;
  double amplitude;
  double width_s;
  bool qrs;
};

constexpr Wave kBeatTemplate[] = {
    {-0.200, 0.15, 0.025, false},  // P
    {-0.030, -0.15, 0.010, true},  // Q
    {0.000, 1.00, 0.012, true},    // R
    {0.030, -0.25, 0.010, true},   // S
    {0.300, 0.35, 0.050, false},   // T
};

double draw_rr(const EmotionProfile& p, Rng& rng) {
  double hr = p.hr_std_bpm > 0.0 ? rng.normal(p.mean_hr_bpm, p.hr_std_bpm) : p.mean_hr_bpm;
  hr = std::clamp(hr, 30.0, 220.0);
  return 60.0 / hr;
}

void check_band(double lo, double hi, double nyquist, const char* what) {
  if (!(lo > 0.0) || !(hi > lo) || !(hi < nyquist)) {
    throw ParameterError(std::string(what) + " band must lie within (0, Nyquist) with low < high");
  }
}

// White noise band-passed to [lo, hi] and rescaled to the requested RMS.
std::vector<double> band_noise(std::size_t n, double fs, double lo, double hi, double rms, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> white(n);
  for (double& w : white) w = rng.normal();
  // odd tap count that fits the record, capped at the default design length
  std::size_t taps = std::min<std::size_t>(dsp::kDefaultTaps, n % 2 == 1 ? n : n - 1);
  if (taps < 3) return std::vector<double>(n, 0.0);
  const auto filter = dsp::design_bandpass(lo, hi, fs, taps, dsp::WindowKind::Hamming);
  auto out = dsp::filter_samples(filter, white);
  double energy = 0.0;
  for (double v : out) energy += v * v;
  const double current = std::sqrt(energy / static_cast<double>(n));
  if (current > 0.0) {
    for (double& v : out) v *= rms / current;
  }
  return out;
}

}  // namespace

void EmotionProfile::validate() const {
  if (!(mean_hr_bpm >= 30.0 && mean_hr_bpm <= 220.0)) throw ParameterError("mean heart rate must lie in [30, 220] bpm");
  if (!(hr_std_bpm >= 0.0)) throw ParameterError("heart-rate std must be non-negative");
  if (!(qrs_amp_scale > 0.0) || !(t_amp_scale > 0.0)) throw ParameterError("amplitude scales must be positive");
}

EmotionProfile default_profile(Emotion e) {
  switch (e) {
    case Emotion::Calm: return {65.0, 3.0, 0.90, 1.10};
    case Emotion::Happy: return {75.0, 5.0, 1.00, 1.00};
    case Emotion::Tense: return {88.0, 6.0, 1.10, 0.85};
    case Emotion::Exciting: return {105.0, 8.0, 1.20, 0.90};
  }
  return {};
}

void NoiseSpec::validate(double sample_rate_hz) const {
  if (baseline_drift_amp < 0.0 || powerline_amp < 0.0 || emg_amp < 0.0 || electrode_amp < 0.0) {
    throw ParameterError("noise amplitudes must be non-negative");
  }
  const double nyquist = sample_rate_hz / 2.0;
  if (!(baseline_drift_hz > 0.0 && baseline_drift_hz < nyquist)) {
    throw ParameterError("baseline drift frequency must lie within (0, Nyquist)");
  }
  if (!(powerline_hz > 0.0 && powerline_hz < nyquist)) {
    throw ParameterError("power-line frequency must lie within (0, Nyquist)");
  }
  check_band(emg_low_hz, emg_high_hz, nyquist, "EMG");
  check_band(electrode_low_hz, electrode_high_hz, nyquist, "electrode");
}

NoiseSpec default_noise(std::uint64_t seed) {
  NoiseSpec spec;
  spec.baseline_drift_amp = 0.3;
  spec.powerline_amp = 0.05;
  spec.emg_amp = 0.03;
  spec.electrode_amp = 0.03;
  spec.seed = seed;
  return spec;
}

SignalRecord generate_clean(const EmotionProfile& profile, Emotion label, int subject_id, double duration_s,
                            double sample_rate_hz, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw ParameterError("duration must be positive");
  if (!(sample_rate_hz >= 100.0)) throw ParameterError("sample rate must be at least 100 Hz");
  profile.validate();

  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  if (n == 0) throw ParameterError("duration too short for the sample rate");
  std::vector<double> samples(n, 0.0);
  Rng rng(seed);

  // Beat R times: the first sits half an interval in; one extra beat on each side
  // lets P and T tails of beats just outside the record leak in.
  std::vector<double> beats;
  double t = 0.5 * draw_rr(profile, rng);
  beats.push_back(t - draw_rr(profile, rng));
  while (t < duration_s + 1.0) {
    beats.push_back(t);
    t += draw_rr(profile, rng);
  }

  for (double r_time : beats) {
    for (const Wave& w : kBeatTemplate) {
      const double amp = w.amplitude * (w.qrs ? profile.qrs_amp_scale : (w.offset_s > 0 ? profile.t_amp_scale : 1.0));
      const double centre = r_time + w.offset_s;
      const double reach = 5.0 * w.width_s;
      const long lo = std::max(0L, static_cast<long>(std::ceil((centre - reach) * sample_rate_hz)));
      const long hi = std::min(static_cast<long>(n) - 1, static_cast<long>(std::floor((centre + reach) * sample_rate_hz)));
      for (long i = lo; i <= hi; ++i) {
        const double d = (static_cast<double>(i) / sample_rate_hz - centre) / w.width_s;
        samples[static_cast<std::size_t>(i)] += amp * std::exp(-0.5 * d * d);
      }
    }
  }
  return SignalRecord(std::move(samples), sample_rate_hz, label, subject_id);
}

SignalRecord inject_noise(const SignalRecord& record, const NoiseSpec& spec) {
  const double fs = record.sample_rate_hz();
  spec.validate(fs);
  std::vector<double> out = record.samples();
  const std::size_t n = out.size();

  if (spec.baseline_drift_amp > 0.0) {
    Rng rng(derive_seed(spec.seed, tag("baseline")));
    const double phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += spec.baseline_drift_amp * std::sin(kTwoPi * spec.baseline_drift_hz * static_cast<double>(i) / fs + phase);
    }
  }
  if (spec.powerline_amp > 0.0) {
    Rng rng(derive_seed(spec.seed, tag("powerline")));
    const double phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += spec.powerline_amp * std::sin(kTwoPi * spec.powerline_hz * static_cast<double>(i) / fs + phase);
    }
  }
  if (spec.emg_amp > 0.0) {
    const auto noise = band_noise(n, fs, spec.emg_low_hz, spec.emg_high_hz, spec.emg_amp, derive_seed(spec.seed, tag("emg")));
    for (std::size_t i = 0; i < n; ++i) out[i] += noise[i];
  }
  if (spec.electrode_amp > 0.0) {
    const auto noise = band_noise(n, fs, spec.electrode_low_hz, spec.electrode_high_hz, spec.electrode_amp,
                                  derive_seed(spec.seed, tag("electrode")));
    for (std::size_t i = 0; i < n; ++i) out[i] += noise[i];
  }
  return record.with_samples(std::move(out));
}

}  // namespace synth
}  // namespace ecgemo
