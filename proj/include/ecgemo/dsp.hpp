#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecgemo/signal.hpp"

namespace ecgemo::dsp {

enum class WindowKind { Hamming, Hanning, Blackman, Rectangular };

std::string_view to_string(WindowKind kind);
/// Case-insensitive; throws ParameterError for unknown names.
WindowKind parse_window(std::string_view name);

/// Window coefficient i of an n-point symmetric window.
double window_value(WindowKind kind, std::size_t i, std::size_t n);

/// Linear-phase band-pass FIR designed by the window method.
struct FirFilter {
  std::vector<double> taps;
  WindowKind window = WindowKind::Hamming;
  double low_cut_hz = 0.0;
  double high_cut_hz = 0.0;  // effective cutoff, after any clamping
  double sample_rate_hz = 0.0;
  std::optional<std::string> warning;

  std::size_t group_delay() const { return (taps.size() - 1) / 2; }
};

inline constexpr std::size_t kDefaultTaps = 257;
inline constexpr double kMaxHighFraction = 0.45;

/// Ideal band-pass (difference of sincs) times the window, normalised to unit
/// gain at sqrt(low*high). A high cutoff at or above 0.45*fs is clamped there
/// and the filter carries a warning.
FirFilter design_bandpass(double low_hz, double high_hz, double sample_rate_hz,
                          std::size_t num_taps = kDefaultTaps, WindowKind window = WindowKind::Hamming);

/// |H(f)| from the DFT of the taps.
double magnitude_response(const std::vector<double>& taps, double freq_hz, double sample_rate_hz);

/// Zero-padded convolution with the group delay removed; output length equals input length.
std::vector<double> filter_samples(const FirFilter& filter, const std::vector<double>& x);

/// Throws ParameterError on a sample-rate mismatch.
SignalRecord apply(const FirFilter& filter, const SignalRecord& record);

/// Where a segment came from.
struct Provenance {
  int subject_id = -1;
  long start_index = -1;

  friend auto operator<=>(const Provenance&, const Provenance&) = default;
};

struct Segment {
  std::vector<double> samples;
  Emotion label = Emotion::Happy;
  Provenance source;
};

inline constexpr std::size_t kMinSegmentLength = 80;

/// floor((len - length) / stride) + 1 windows; empty when the record is shorter than `length`.
std::vector<Segment> segment(const SignalRecord& record, std::size_t length, std::size_t stride);

}  // namespace ecgemo::dsp
