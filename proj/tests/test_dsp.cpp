#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ecgemo/dsp.hpp"
#include "ecgemo/error.hpp"
#include "ecgemo/random.hpp"
#include "ecgemo/synthgen.hpp"
#include "test_support.hpp"

using namespace ecgemo;

namespace {

// |H(f)| by direct DFT of the taps, independent of dsp::magnitude_response.
double oracle_gain(const std::vector<double>& h, double f, double fs) {
  double re = 0.0, im = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    const double a = 2.0 * std::numbers::pi * f * static_cast<double>(n) / fs;
    re += h[n] * std::cos(a);
    im -= h[n] * std::sin(a);
  }
  return std::hypot(re, im);
}

double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

SignalRecord tone(double hz, double seconds, double fs = 128.0) {
  std::vector<double> s(static_cast<std::size_t>(seconds * fs));
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs);
  return SignalRecord(std::move(s), fs, Emotion::Calm, 1);
}

}  // namespace

TEST_CASE("upper cutoff above 0.45 fs is clamped with a warning") {
  const auto f = dsp::design_bandpass(3.0, 100.0, 128.0, 257, dsp::WindowKind::Hamming);
  CHECK(f.high_cut_hz == doctest::Approx(57.6));
  CHECK(f.warning.has_value());
  const auto g = dsp::design_bandpass(3.0, 40.0, 128.0, 257, dsp::WindowKind::Hamming);
  CHECK(g.high_cut_hz == 40.0);
  CHECK_FALSE(g.warning.has_value());
}

TEST_CASE("every design is linear phase") {
  for (auto w : {dsp::WindowKind::Hamming, dsp::WindowKind::Hanning, dsp::WindowKind::Blackman,
                 dsp::WindowKind::Rectangular}) {
    for (std::size_t taps : {3u, 31u, 257u}) {
      const auto f = dsp::design_bandpass(2.0, 30.0, 128.0, taps, w);
      REQUIRE(f.taps.size() == taps);
      for (std::size_t i = 0; i < taps; ++i) CHECK(std::abs(f.taps[i] - f.taps[taps - 1 - i]) <= 1e-12);
    }
  }
}

TEST_CASE("reference design blocks DC and has unit gain at the band centre") {
  const auto f = dsp::design_bandpass(3.0, 57.6, 128.0, 257, dsp::WindowKind::Hamming);
  CHECK(oracle_gain(f.taps, 0.0, 128.0) <= 0.01);
  CHECK(oracle_gain(f.taps, std::sqrt(3.0 * 57.6), 128.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(dsp::magnitude_response(f.taps, 10.0, 128.0) == doctest::Approx(oracle_gain(f.taps, 10.0, 128.0)));
}

TEST_CASE("design rejects invalid parameters") {
  CHECK_THROWS_AS(dsp::design_bandpass(3.0, 40.0, 128.0, 256), ParameterError);
  CHECK_THROWS_AS(dsp::design_bandpass(3.0, 40.0, 128.0, 1), ParameterError);
  CHECK_THROWS_AS(dsp::design_bandpass(40.0, 3.0, 128.0, 257), ParameterError);
  CHECK_THROWS_AS(dsp::design_bandpass(0.0, 3.0, 128.0, 257), ParameterError);
  CHECK_THROWS_AS(dsp::design_bandpass(64.0, 100.0, 128.0, 257), ParameterError);
  CHECK_THROWS_AS(dsp::design_bandpass(60.0, 100.0, 128.0, 257), ParameterError);  // low above the clamp
  CHECK_THROWS_AS(dsp::parse_window("kaiser"), ParameterError);
}

TEST_CASE("rectangular window leaves the ideal response untouched up to scale") {
  const std::size_t n = 63;
  const auto f = dsp::design_bandpass(5.0, 20.0, 100.0, n, dsp::WindowKind::Rectangular);
  auto ideal = [&](double m) {
    auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x); };
    return 0.4 * sinc(0.4 * m) - 0.1 * sinc(0.1 * m);
  };
  const double scale = f.taps[31] / ideal(0.0);
  for (std::size_t i = 0; i < n; ++i) CHECK(f.taps[i] == doctest::Approx(scale * ideal(static_cast<double>(i) - 31.0)).epsilon(1e-12));
}

TEST_CASE("tapering windows decrease from centre to edges") {
  for (auto w : {dsp::WindowKind::Hamming, dsp::WindowKind::Hanning, dsp::WindowKind::Blackman}) {
    const std::size_t n = 101;
    for (std::size_t i = 50; i + 1 < n; ++i) CHECK(dsp::window_value(w, i + 1, n) <= dsp::window_value(w, i, n) + 1e-15);
    for (std::size_t i = 50; i > 0; --i) CHECK(dsp::window_value(w, i - 1, n) <= dsp::window_value(w, i, n) + 1e-15);
  }
  CHECK(dsp::window_value(dsp::WindowKind::Rectangular, 0, 11) == 1.0);
}

TEST_CASE("filtering preserves length and linearity") {
  const auto f = dsp::design_bandpass(3.0, 100.0, 128.0);
  const SignalRecord zero(std::vector<double>(500, 0.0), 128.0, Emotion::Calm, 1);
  const auto out = dsp::apply(f, zero);
  CHECK(out.size() == 500);
  for (double v : out.samples()) CHECK(v == 0.0);

  Rng rng(3);
  std::vector<double> x(700), y(700), mix(700);
  const double a = 1.7, b = -0.6;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    y[i] = rng.normal();
    mix[i] = a * x[i] + b * y[i];
  }
  const auto fx = dsp::filter_samples(f, x);
  const auto fy = dsp::filter_samples(f, y);
  const auto fm = dsp::filter_samples(f, mix);
  double scale = 0.0;
  for (double v : fm) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fm[i] - (a * fx[i] + b * fy[i])) <= 1e-9 * scale);
}

TEST_CASE("passband and stopband behaviour on pure tones") {
  const auto f = dsp::design_bandpass(3.0, 100.0, 128.0);
  const auto pass_in = tone(10.0, 300.0);
  const auto pass_out = dsp::apply(f, pass_in);
  CHECK(std::abs(rms(pass_out.samples()) / rms(pass_in.samples()) - 1.0) <= 0.12);

  const auto stop_in = tone(0.3, 300.0);
  const auto stop_out = dsp::apply(f, stop_in);
  CHECK(rms(stop_out.samples()) <= 0.10 * rms(stop_in.samples()));
}

TEST_CASE("group delay is compensated") {
  const auto clean = synth::generate_clean({72.0, 0.0, 1.0, 1.0}, Emotion::Happy, 1, 20.0, 128.0, 4);
  const auto filtered = dsp::apply(dsp::design_bandpass(3.0, 100.0, 128.0), clean);
  const auto before = ecgemo::testing::r_peaks(clean.samples());
  const auto after = ecgemo::testing::r_peaks(filtered.samples());
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(std::abs(static_cast<long>(before[i]) - static_cast<long>(after[i])) <= 1);
  }
}

TEST_CASE("apply rejects a sample-rate mismatch") {
  const auto f = dsp::design_bandpass(3.0, 40.0, 128.0);
  const SignalRecord r(std::vector<double>(300, 1.0), 256.0, Emotion::Calm, 1);
  CHECK_THROWS_AS(dsp::apply(f, r), ParameterError);
}

TEST_CASE("segmentation counts and provenance") {
  const SignalRecord r(std::vector<double>(38400, 0.5), 128.0, Emotion::Tense, 4);
  const auto a = dsp::segment(r, 256, 256);
  CHECK(a.size() == 150);
  CHECK(dsp::segment(r, 256, 128).size() == 299);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].samples.size() == 256);
    CHECK(a[i].label == Emotion::Tense);
    CHECK(a[i].source.subject_id == 4);
    CHECK(a[i].source.start_index == static_cast<long>(256 * i));
  }
  const SignalRecord shorter(std::vector<double>(255, 0.0), 128.0, Emotion::Calm, 1);
  CHECK(dsp::segment(shorter, 256, 256).empty());
  CHECK_THROWS_AS(dsp::segment(r, 79, 10), ParameterError);
  CHECK_THROWS_AS(dsp::segment(r, 256, 0), ParameterError);
}
