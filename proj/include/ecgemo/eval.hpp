#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecgemo/emotion.hpp"

namespace ecgemo::eval {

/// counts[true][predicted].
struct ConfusionMatrix {
  std::array<std::array<long, kNumEmotions>, kNumEmotions> counts{};

  long total() const;
  long row_sum(Emotion truth) const;
  long trace() const;
  /// trace / total.
  double accuracy() const;
};

/// Throws ParameterError on length mismatch or empty input.
ConfusionMatrix confusion(const std::vector<Emotion>& truth, const std::vector<Emotion>& predicted);

using Rates = std::array<std::optional<double>, kNumEmotions>;

/// Diagonal over row sum per emotion; an empty row is nullopt, never 0.
Rates recognition_rates(const ConfusionMatrix& cm);

/// Unweighted mean of per-emotion rates, or (weighted) trace/total.
/// Throws DataError if any rate is missing.
double average_rate(const ConfusionMatrix& cm, bool weighted = false);

struct EmotionSummary {
  double highest = 0.0;
  double lowest = 0.0;
  double average = 0.0;
};

struct RecognitionReport {
  std::string classifier;
  std::array<EmotionSummary, kNumEmotions> per_emotion{};
  double overall_average = 0.0;
  std::vector<ConfusionMatrix> runs;
};

/// Aggregates per-run matrices. Throws DataError if any run has an empty row.
RecognitionReport summarize(const std::string& classifier, const std::vector<ConfusionMatrix>& runs,
                            bool weighted = false);

/// One run: returns the confusion matrix for a run seed.
using RunFn = std::function<ConfusionMatrix(std::uint64_t run_seed)>;

/// Runs `runs` times with seeds derived from `seed` and summarises.
RecognitionReport run_repeated(const std::string& classifier, const RunFn& run, std::size_t runs, std::uint64_t seed,
                               bool weighted = false);

std::uint64_t run_seed(std::uint64_t master, std::size_t run_index);

/// Inclusive arithmetic range lo, lo+step, ..., <= hi. Throws ParameterError if empty or step == 0.
std::vector<long> parameter_range(long lo, long hi, long step);

struct CurvePoint {
  long parameter = 0;
  double mean_rate = 0.0;
  /// Secondary per-point metric, e.g. forest generalization error; NaN-free when present.
  std::optional<double> extra;
};

struct Curve {
  std::string parameter_name;
  std::string extra_name;
  std::vector<CurvePoint> points;

  /// argmax of mean_rate, ties to the smaller parameter.
  long best_parameter() const;
};

/// Evaluates one (parameter, run) cell: returns (rate, optional extra metric).
using SweepFn = std::function<std::pair<double, std::optional<double>>(long parameter, std::uint64_t run_seed)>;

Curve sweep(const std::string& parameter_name, const std::vector<long>& values, std::size_t runs,
            std::uint64_t seed, const SweepFn& cell, const std::string& extra_name = "");

// --- rendering ---

/// Two-column CSV (parameter,mean_rate[,extra]).
std::string curve_csv(const Curve& curve);

/// Stored run output: one row per (run, true emotion) with the predicted counts,
/// `classifier,run,true,pred_0,pred_1,pred_2,pred_3`. `report` re-reads these.
std::string runs_csv(const RecognitionReport& report);

/// Parses one or more classifiers' runs back into matrices grouped by classifier (in first-seen order).
std::vector<std::pair<std::string, std::vector<ConfusionMatrix>>> parse_runs_csv(const std::string& text);

/// Highest/Lowest/Average rows across the four emotions, CSV.
std::string report_csv(const RecognitionReport& report);

/// Aligned text table with the same rows, rates formatted as percentages.
std::string report_table(const RecognitionReport& report);

/// Classifier vs overall average, for several reports.
std::string comparison_csv(const std::vector<RecognitionReport>& reports);
std::string comparison_table(const std::vector<RecognitionReport>& reports);

std::string confusion_csv(const ConfusionMatrix& cm);

}  // namespace ecgemo::eval
