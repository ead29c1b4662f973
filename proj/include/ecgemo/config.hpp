#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ecgemo/dsp.hpp"
#include "ecgemo/emotion.hpp"
#include "ecgemo/forest.hpp"
#include "ecgemo/knn.hpp"
#include "ecgemo/pso.hpp"
#include "ecgemo/svm.hpp"
#include "ecgemo/synthgen.hpp"

namespace ecgemo {

enum class ClassifierKind { Svm, Forest, Knn };

std::string_view to_string(ClassifierKind kind);
/// "svm", "forest", "knn"; throws ConfigError otherwise.
ClassifierKind parse_classifier(std::string_view text);

struct SweepRange {
  long lo = 0;
  long hi = 0;
  long step = 1;
};

/// Every pipeline knob. Text form is one `key = value` per line with `#` comments.
struct PipelineConfig {
  std::uint64_t seed = 1;

  // acquisition
  double sample_rate_hz = 128.0;
  double duration_s = 300.0;
  int subjects = 5;
  std::array<synth::EmotionProfile, kNumEmotions> profiles{};
  synth::NoiseSpec noise{};  // seed unused; per-record seeds derive from `seed`

  // filtering and segmentation
  double low_cut_hz = 3.0;
  double high_cut_hz = 100.0;
  std::size_t fir_taps = dsp::kDefaultTaps;
  dsp::WindowKind fir_window = dsp::WindowKind::Hamming;
  bool apply_filter = true;
  std::size_t segment_length = 256;
  std::size_t segment_stride = 256;

  // features and split
  std::size_t feature_count = 75;
  bool standardize = false;
  std::vector<int> train_subjects{1, 2, 3, 4};
  std::vector<int> test_subjects{5};
  std::size_t train_size = 4000;
  std::size_t test_size = 1200;

  // classifiers
  ClassifierKind classifier = ClassifierKind::Svm;
  svm::SvmParams svm{};
  bool svm_tune = true;
  pso::PsoConfig pso{};  // seed unused; derived per run
  forest::ForestParams forest{};
  std::size_t knn_k = 3;
  knn::Metric knn_metric{};
  std::size_t knn_folds = 5;

  // evaluation
  std::size_t runs = 10;
  bool weighted_average = false;
  SweepRange sweep_features{20, 80, 5};
  SweepRange sweep_trees{30, 100, 10};
  SweepRange sweep_k{1, 10, 1};

  PipelineConfig();

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Parses the key=value text, starting from defaults. Unknown keys, duplicate
/// keys and malformed values throw ConfigError.
PipelineConfig parse_config(const std::string& text);

/// Canonical text form listing every key; parse_config(to_text(c)) == c.
std::string to_text(const PipelineConfig& config);

/// Applies a single `key=value` override (used for CLI flags such as --seed).
void set_option(PipelineConfig& config, const std::string& key, const std::string& value);

/// All recognised keys, in canonical order.
std::vector<std::string> config_keys();

}  // namespace ecgemo
