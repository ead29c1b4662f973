#include "ecgemo/config.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "ecgemo/error.hpp"
#include "ecgemo/text.hpp"

namespace ecgemo {
namespace {

struct Entry {
  std::string key;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

double as_double(std::string_view v) { return text::parse_double(v); }

std::size_t as_size(std::string_view v) {
  const long long x = text::parse_int(v);
  if (x < 0) throw DataError("expected a non-negative integer, got " + std::string(v));
  return static_cast<std::size_t>(x);
}

bool as_bool(std::string_view v) {
  v = text::trim(v);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DataError("expected true/false, got " + std::string(v));
}

std::vector<int> as_int_list(std::string_view v) {
  std::vector<int> out;
  for (auto f : text::split(v, ',')) {
    if (!text::trim(f).empty()) out.push_back(static_cast<int>(text::parse_int(f)));
  }
  return out;
}

std::string int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

SweepRange as_range(std::string_view v) {
  const auto f = text::split(v, ':');
  if (f.size() != 2 && f.size() != 3) throw DataError("expected lo:hi[:step], got " + std::string(v));
  SweepRange r;
  r.lo = static_cast<long>(text::parse_int(f[0]));
  r.hi = static_cast<long>(text::parse_int(f[1]));
  r.step = f.size() == 3 ? static_cast<long>(text::parse_int(f[2])) : 1;
  return r;
}

std::string range_text(const SweepRange& r) {
  return std::to_string(r.lo) + ":" + std::to_string(r.hi) + ":" + std::to_string(r.step);
}

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

#define DOUBLE_ENTRY(name, field)                                                   \
  Entry {                                                                           \
    name, [](PipelineConfig& c, std::string_view v) { c.field = as_double(v); },    \
        [](const PipelineConfig& c) { return text::format_double(c.field); }        \
  }
#define SIZE_ENTRY(name, field)                                                     \
  Entry {                                                                           \
    name, [](PipelineConfig& c, std::string_view v) { c.field = as_size(v); },      \
        [](const PipelineConfig& c) { return std::to_string(c.field); }             \
  }
#define BOOL_ENTRY(name, field)                                                     \
  Entry {                                                                           \
    name, [](PipelineConfig& c, std::string_view v) { c.field = as_bool(v); },      \
        [](const PipelineConfig& c) { return std::string(c.field ? "true" : "false"); } \
  }
#define RANGE_ENTRY(name, field)                                                    \
  Entry {                                                                           \
    name, [](PipelineConfig& c, std::string_view v) { c.field = as_range(v); },     \
        [](const PipelineConfig& c) { return range_text(c.field); }                 \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t = {
        Entry{"seed", [](PipelineConfig& c, std::string_view v) { c.seed = static_cast<std::uint64_t>(as_size(v)); },
              [](const PipelineConfig& c) { return std::to_string(c.seed); }},
        DOUBLE_ENTRY("sample_rate_hz", sample_rate_hz),
        DOUBLE_ENTRY("duration_s", duration_s),
        Entry{"subjects", [](PipelineConfig& c, std::string_view v) { c.subjects = static_cast<int>(as_size(v)); },
              [](const PipelineConfig& c) { return std::to_string(c.subjects); }},
    };
    for (Emotion e : kAllEmotions) {
      const std::string prefix = "profile_" + lower(name(e)) + "_";
      const auto i = static_cast<std::size_t>(code(e));
      t.push_back({prefix + "hr_mean", [i](PipelineConfig& c, std::string_view v) { c.profiles[i].mean_hr_bpm = as_double(v); },
                   [i](const PipelineConfig& c) { return text::format_double(c.profiles[i].mean_hr_bpm); }});
      t.push_back({prefix + "hr_std", [i](PipelineConfig& c, std::string_view v) { c.profiles[i].hr_std_bpm = as_double(v); },
                   [i](const PipelineConfig& c) { return text::format_double(c.profiles[i].hr_std_bpm); }});
      t.push_back({prefix + "qrs_scale", [i](PipelineConfig& c, std::string_view v) { c.profiles[i].qrs_amp_scale = as_double(v); },
                   [i](const PipelineConfig& c) { return text::format_double(c.profiles[i].qrs_amp_scale); }});
      t.push_back({prefix + "t_scale", [i](PipelineConfig& c, std::string_view v) { c.profiles[i].t_amp_scale = as_double(v); },
                   [i](const PipelineConfig& c) { return text::format_double(c.profiles[i].t_amp_scale); }});
    }
    const std::vector<Entry> rest = {
        DOUBLE_ENTRY("noise_baseline_amp", noise.baseline_drift_amp),
        DOUBLE_ENTRY("noise_baseline_hz", noise.baseline_drift_hz),
        DOUBLE_ENTRY("noise_powerline_amp", noise.powerline_amp),
        DOUBLE_ENTRY("noise_powerline_hz", noise.powerline_hz),
        DOUBLE_ENTRY("noise_emg_amp", noise.emg_amp),
        DOUBLE_ENTRY("noise_emg_low_hz", noise.emg_low_hz),
        DOUBLE_ENTRY("noise_emg_high_hz", noise.emg_high_hz),
        DOUBLE_ENTRY("noise_electrode_amp", noise.electrode_amp),
        DOUBLE_ENTRY("noise_electrode_low_hz", noise.electrode_low_hz),
        DOUBLE_ENTRY("noise_electrode_high_hz", noise.electrode_high_hz),
        DOUBLE_ENTRY("low_cut_hz", low_cut_hz),
        DOUBLE_ENTRY("high_cut_hz", high_cut_hz),
        SIZE_ENTRY("fir_taps", fir_taps),
        Entry{"fir_window", [](PipelineConfig& c, std::string_view v) { c.fir_window = dsp::parse_window(v); },
              [](const PipelineConfig& c) { return std::string(dsp::to_string(c.fir_window)); }},
        BOOL_ENTRY("apply_filter", apply_filter),
        SIZE_ENTRY("segment_length", segment_length),
        SIZE_ENTRY("segment_stride", segment_stride),
        SIZE_ENTRY("feature_count", feature_count),
        BOOL_ENTRY("standardize", standardize),
        Entry{"train_subjects", [](PipelineConfig& c, std::string_view v) { c.train_subjects = as_int_list(v); },
              [](const PipelineConfig& c) { return int_list(c.train_subjects); }},
        Entry{"test_subjects", [](PipelineConfig& c, std::string_view v) { c.test_subjects = as_int_list(v); },
              [](const PipelineConfig& c) { return int_list(c.test_subjects); }},
        SIZE_ENTRY("train_size", train_size),
        SIZE_ENTRY("test_size", test_size),
        Entry{"classifier", [](PipelineConfig& c, std::string_view v) { c.classifier = parse_classifier(v); },
              [](const PipelineConfig& c) { return std::string(to_string(c.classifier)); }},
        DOUBLE_ENTRY("svm_c", svm.c),
        DOUBLE_ENTRY("svm_gamma", svm.gamma),
        DOUBLE_ENTRY("svm_tolerance", svm.tolerance),
        SIZE_ENTRY("svm_max_passes", svm.max_passes),
        BOOL_ENTRY("svm_tune", svm_tune),
        SIZE_ENTRY("pso_swarm_size", pso.swarm_size),
        SIZE_ENTRY("pso_iterations", pso.iterations),
        DOUBLE_ENTRY("pso_c1", pso.c1),
        DOUBLE_ENTRY("pso_c2", pso.c2),
        DOUBLE_ENTRY("pso_inertia", pso.inertia),
        DOUBLE_ENTRY("pso_log_c_min", pso.bounds[0].lo),
        DOUBLE_ENTRY("pso_log_c_max", pso.bounds[0].hi),
        DOUBLE_ENTRY("pso_log_gamma_min", pso.bounds[1].lo),
        DOUBLE_ENTRY("pso_log_gamma_max", pso.bounds[1].hi),
        DOUBLE_ENTRY("pso_velocity_clamp", pso.velocity_clamp),
        SIZE_ENTRY("pso_cv_folds", pso.cv_folds),
        SIZE_ENTRY("pso_max_samples", pso.max_samples),
        SIZE_ENTRY("forest_trees", forest.num_trees),
        SIZE_ENTRY("forest_features_per_split", forest.features_per_split),
        SIZE_ENTRY("forest_max_depth", forest.max_depth),
        SIZE_ENTRY("forest_min_leaf", forest.min_leaf),
        SIZE_ENTRY("knn_k", knn_k),
        Entry{"knn_metric", [](PipelineConfig& c, std::string_view v) { c.knn_metric = knn::parse_metric(v); },
              [](const PipelineConfig& c) { return knn::to_string(c.knn_metric); }},
        SIZE_ENTRY("knn_folds", knn_folds),
        SIZE_ENTRY("runs", runs),
        BOOL_ENTRY("weighted_average", weighted_average),
        RANGE_ENTRY("sweep_features", sweep_features),
        RANGE_ENTRY("sweep_trees", sweep_trees),
        RANGE_ENTRY("sweep_k", sweep_k),
    };
    t.insert(t.end(), rest.begin(), rest.end());
    return t;
  }();
  return table;
}

#undef DOUBLE_ENTRY
#undef SIZE_ENTRY
#undef BOOL_ENTRY
#undef RANGE_ENTRY

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::Forest: return "forest";
    case ClassifierKind::Knn: return "knn";
  }
  return "?";
}

ClassifierKind parse_classifier(std::string_view t) {
  const std::string s = lower(text::trim(t));
  if (s == "svm" || s == "pso-svm") return ClassifierKind::Svm;
  if (s == "forest" || s == "rf") return ClassifierKind::Forest;
  if (s == "knn" || s == "k-nn") return ClassifierKind::Knn;
  throw ConfigError("unknown classifier '" + std::string(t) + "'");
}

PipelineConfig::PipelineConfig() {
  for (Emotion e : kAllEmotions) profiles[static_cast<std::size_t>(code(e))] = synth::default_profile(e);
  noise = synth::default_noise(0);
}

void PipelineConfig::validate() const {
  try {
    if (!(sample_rate_hz >= 100.0)) throw ConfigError("sample_rate_hz must be at least 100");
    if (!(duration_s > 0.0)) throw ConfigError("duration_s must be positive");
    if (subjects < 1) throw ConfigError("subjects must be at least 1");
    for (const auto& p : profiles) p.validate();
    noise.validate(sample_rate_hz);
    if (fir_taps < 3 || fir_taps % 2 == 0) throw ConfigError("fir_taps must be odd and at least 3");
    if (!(low_cut_hz > 0.0 && high_cut_hz > low_cut_hz)) throw ConfigError("cutoffs must satisfy 0 < low < high");
    if (segment_length < dsp::kMinSegmentLength) throw ConfigError("segment_length must be at least 80");
    if (segment_stride < 1) throw ConfigError("segment_stride must be at least 1");
    if (feature_count < 1 || feature_count > segment_length) {
      throw ConfigError("feature_count must lie in [1, segment_length]");
    }
    std::set<int> train(train_subjects.begin(), train_subjects.end());
    for (int s : test_subjects) {
      if (train.count(s)) throw ConfigError("subject " + std::to_string(s) + " is in both train and test sets");
    }
    for (const auto* group : {&train_subjects, &test_subjects}) {
      if (group->empty()) throw ConfigError("train_subjects and test_subjects must be non-empty");
      for (int s : *group) {
        if (s < 1 || s > subjects) throw ConfigError("subject id " + std::to_string(s) + " outside 1..subjects");
      }
    }
    if (train_size < kNumEmotions || test_size < kNumEmotions) {
      throw ConfigError("train_size and test_size must be at least 4");
    }
    svm.validate();
    pso.validate();
    if (forest.num_trees < 1) throw ConfigError("forest_trees must be at least 1");
    if (forest.min_leaf < 1) throw ConfigError("forest_min_leaf must be at least 1");
    if (knn_k < 1) throw ConfigError("knn_k must be at least 1");
    if (knn_folds < 2) throw ConfigError("knn_folds must be at least 2");
    if (runs < 1) throw ConfigError("runs must be at least 1");
    for (const auto* r : {&sweep_features, &sweep_trees, &sweep_k}) {
      if (r->step <= 0 || r->hi < r->lo || r->lo < 1) throw ConfigError("sweep ranges need 1 <= lo <= hi and step > 0");
    }
    if (static_cast<std::size_t>(sweep_features.hi) > segment_length) {
      throw ConfigError("sweep_features upper bound exceeds segment_length");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void set_option(PipelineConfig& config, const std::string& key, const std::string& value) {
  const auto& t = entries();
  const auto it = std::find_if(t.begin(), t.end(), [&](const Entry& e) { return e.key == key; });
  if (it == t.end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->set(config, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

PipelineConfig parse_config(const std::string& contents) {
  PipelineConfig config;
  std::set<std::string> seen;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = text::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string value(text::trim(body.substr(eq + 1)));
    if (!seen.insert(key).second) throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    try {
      set_option(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

std::string to_text(const PipelineConfig& config) {
  std::string out;
  for (const auto& e : entries()) out += e.key + " = " + e.get(config) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : entries()) keys.push_back(e.key);
  return keys;
}

}  // namespace ecgemo
