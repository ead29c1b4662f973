#include "ecgemo/dsp.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "ecgemo/error.hpp"
#include "ecgemo/text.hpp"

namespace ecgemo::dsp {
namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::Hamming: return "hamming";
    case WindowKind::Hanning: return "hanning";
    case WindowKind::Blackman: return "blackman";
    case WindowKind::Rectangular: return "rectangular";
  }
  return "?";
}

WindowKind parse_window(std::string_view name) {
  std::string lower;
  for (char c : text::trim(name)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "hamming") return WindowKind::Hamming;
  if (lower == "hanning" || lower == "hann") return WindowKind::Hanning;
  if (lower == "blackman") return WindowKind::Blackman;
  if (lower == "rectangular" || lower == "rect") return WindowKind::Rectangular;
  throw ParameterError("unknown window kind: " + std::string(name));
}

double window_value(WindowKind kind, std::size_t i, std::size_t n) {
  if (n == 1) return 1.0;
  const double x = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1);
  switch (kind) {
    case WindowKind::Hamming: return 0.54 - 0.46 * std::cos(x);
    case WindowKind::Hanning: return 0.5 - 0.5 * std::cos(x);
    case WindowKind::Blackman: return 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
    case WindowKind::Rectangular: return 1.0;
  }
  return 1.0;
}

double magnitude_response(const std::vector<double>& taps, double freq_hz, double sample_rate_hz) {
  const double omega = 2.0 * kPi * freq_hz / sample_rate_hz;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 0; n < taps.size(); ++n) {
    acc += taps[n] * std::polar(1.0, -omega * static_cast<double>(n));
  }
  return std::abs(acc);
}

FirFilter design_bandpass(double low_hz, double high_hz, double sample_rate_hz, std::size_t num_taps,
                          WindowKind window) {
  if (!(sample_rate_hz > 0.0)) throw ParameterError("sample rate must be positive");
  if (num_taps < 3 || num_taps % 2 == 0) {
    throw ParameterError("tap count must be odd and at least 3, got " + std::to_string(num_taps));
  }
  if (!(low_hz > 0.0) || !(high_hz > low_hz)) {
    throw ParameterError("cutoffs must satisfy 0 < low < high");
  }
  if (!(low_hz < sample_rate_hz / 2.0)) throw ParameterError("low cutoff must be below Nyquist");

  FirFilter f;
  f.window = window;
  f.sample_rate_hz = sample_rate_hz;
  f.low_cut_hz = low_hz;
  f.high_cut_hz = high_hz;
  const double limit = kMaxHighFraction * sample_rate_hz;
  if (high_hz >= limit) {
    f.high_cut_hz = limit;
    std::ostringstream msg;
    msg << "high cutoff " << text::format_double(high_hz) << " Hz clamped to " << text::format_double(limit)
        << " Hz (0.45*fs)";
    f.warning = msg.str();
    if (!(low_hz < limit)) throw ParameterError("low cutoff must be below the clamped high cutoff");
  }

  const double fl = f.low_cut_hz / sample_rate_hz;
  const double fh = f.high_cut_hz / sample_rate_hz;
  const auto centre = static_cast<double>((num_taps - 1) / 2);
  f.taps.resize(num_taps);
  for (std::size_t i = 0; i < num_taps; ++i) {
    const double m = static_cast<double>(i) - centre;
    const double ideal = 2.0 * fh * sinc(2.0 * fh * m) - 2.0 * fl * sinc(2.0 * fl * m);
    f.taps[i] = ideal * window_value(window, i, num_taps);
  }
  // force exact symmetry; the two halves can differ in the last ulp
  for (std::size_t i = 0; i < num_taps / 2; ++i) f.taps[num_taps - 1 - i] = f.taps[i];

  const double gain = magnitude_response(f.taps, std::sqrt(f.low_cut_hz * f.high_cut_hz), sample_rate_hz);
  if (!(gain > 0.0)) throw ParameterError("degenerate filter design (zero gain in passband)");
  for (double& t : f.taps) t /= gain;
  return f;
}

std::vector<double> filter_samples(const FirFilter& filter, const std::vector<double>& x) {
  const auto n = static_cast<long>(x.size());
  const auto taps = static_cast<long>(filter.taps.size());
  const auto delay = static_cast<long>(filter.group_delay());
  std::vector<double> y(x.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    // y[i] = sum_k h[k] * x[i + delay - k]
    const long k_lo = std::max(0L, i + delay - (n - 1));
    const long k_hi = std::min(taps - 1, i + delay);
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) acc += filter.taps[k] * x[i + delay - k];
    y[i] = acc;
  }
  return y;
}

SignalRecord apply(const FirFilter& filter, const SignalRecord& record) {
  if (filter.sample_rate_hz != record.sample_rate_hz()) {
    throw ParameterError("sample rate mismatch: filter " + text::format_double(filter.sample_rate_hz) +
                         " Hz, record " + text::format_double(record.sample_rate_hz()) + " Hz");
  }
  return record.with_samples(filter_samples(filter, record.samples()));
}

std::vector<Segment> segment(const SignalRecord& record, std::size_t length, std::size_t stride) {
  if (length < kMinSegmentLength) {
    throw ParameterError("segment length must be at least " + std::to_string(kMinSegmentLength));
  }
  if (stride < 1) throw ParameterError("segment stride must be at least 1");
  std::vector<Segment> out;
  const auto& s = record.samples();
  if (s.size() < length) return out;
  const std::size_t count = (s.size() - length) / stride + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * stride;
    Segment seg;
    seg.samples.assign(s.begin() + static_cast<long>(start), s.begin() + static_cast<long>(start + length));
    seg.label = record.label();
    seg.source = Provenance{record.subject_id(), static_cast<long>(start)};
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace ecgemo::dsp
