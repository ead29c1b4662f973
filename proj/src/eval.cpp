#include "ecgemo/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "ecgemo/error.hpp"
#include "ecgemo/random.hpp"
#include "ecgemo/text.hpp"

namespace ecgemo::eval {
namespace {

std::size_t idx(Emotion e) { return static_cast<std::size_t>(code(e)); }

}  // namespace

long ConfusionMatrix::total() const {
  long t = 0;
  for (const auto& row : counts) t += std::accumulate(row.begin(), row.end(), 0L);
  return t;
}

long ConfusionMatrix::row_sum(Emotion truth) const {
  const auto& row = counts[idx(truth)];
  return std::accumulate(row.begin(), row.end(), 0L);
}

long ConfusionMatrix::trace() const {
  long t = 0;
  for (std::size_t i = 0; i < kNumEmotions; ++i) t += counts[i][i];
  return t;
}

double ConfusionMatrix::accuracy() const {
  const long n = total();
  if (n == 0) throw DataError("accuracy of an empty confusion matrix");
  return static_cast<double>(trace()) / static_cast<double>(n);
}

ConfusionMatrix confusion(const std::vector<Emotion>& truth, const std::vector<Emotion>& predicted) {
  if (truth.size() != predicted.size()) {
    throw ParameterError("label sequences differ in length (" + std::to_string(truth.size()) + " vs " +
                         std::to_string(predicted.size()) + ")");
  }
  if (truth.empty()) throw ParameterError("confusion matrix of empty label sequences");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm.counts[idx(truth[i])][idx(predicted[i])];
  return cm;
}

Rates recognition_rates(const ConfusionMatrix& cm) {
  Rates r;
  for (Emotion e : kAllEmotions) {
    const long row = cm.row_sum(e);
    if (row > 0) r[idx(e)] = static_cast<double>(cm.counts[idx(e)][idx(e)]) / static_cast<double>(row);
  }
  return r;
}

double average_rate(const ConfusionMatrix& cm, bool weighted) {
  const Rates r = recognition_rates(cm);
  for (Emotion e : kAllEmotions) {
    if (!r[idx(e)]) throw DataError("no test samples for emotion " + std::string(name(e)));
  }
  if (weighted) return cm.accuracy();
  double s = 0.0;
  for (const auto& v : r) s += *v;
  return s / static_cast<double>(kNumEmotions);
}

RecognitionReport summarize(const std::string& classifier, const std::vector<ConfusionMatrix>& runs, bool weighted) {
  if (runs.empty()) throw ParameterError("report needs at least one run");
  RecognitionReport rep;
  rep.classifier = classifier;
  rep.runs = runs;
  std::array<std::vector<double>, kNumEmotions> rates;
  double overall = 0.0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const Rates r = recognition_rates(runs[k]);
    for (Emotion e : kAllEmotions) {
      if (!r[idx(e)]) {
        throw DataError("run " + std::to_string(k) + " has no test samples for emotion " + std::string(name(e)));
      }
      rates[idx(e)].push_back(*r[idx(e)]);
    }
    overall += average_rate(runs[k], weighted);
  }
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    const auto& v = rates[c];
    rep.per_emotion[c].highest = *std::max_element(v.begin(), v.end());
    rep.per_emotion[c].lowest = *std::min_element(v.begin(), v.end());
    rep.per_emotion[c].average = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  }
  rep.overall_average = overall / static_cast<double>(runs.size());
  return rep;
}

std::uint64_t run_seed(std::uint64_t master, std::size_t run_index) {
  return derive_seed(derive_seed(master, tag("run")), run_index);
}

RecognitionReport run_repeated(const std::string& classifier, const RunFn& run, std::size_t runs, std::uint64_t seed,
                               bool weighted) {
  if (runs < 1) throw ParameterError("runs must be at least 1");
  std::vector<ConfusionMatrix> matrices;
  matrices.reserve(runs);
  for (std::size_t k = 0; k < runs; ++k) matrices.push_back(run(run_seed(seed, k)));
  return summarize(classifier, matrices, weighted);
}

std::vector<long> parameter_range(long lo, long hi, long step) {
  if (step <= 0) throw ParameterError("sweep step must be positive");
  if (hi < lo) throw ParameterError("sweep range is empty (hi < lo)");
  std::vector<long> out;
  for (long v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

long Curve::best_parameter() const {
  if (points.empty()) throw UsageError("empty curve");
  const CurvePoint* best = &points.front();
  for (const auto& p : points) {
    if (p.mean_rate > best->mean_rate || (p.mean_rate == best->mean_rate && p.parameter < best->parameter)) best = &p;
  }
  return best->parameter;
}

Curve sweep(const std::string& parameter_name, const std::vector<long>& values, std::size_t runs,
            std::uint64_t seed, const SweepFn& cell, const std::string& extra_name) {
  if (values.empty()) throw ParameterError("sweep has no parameter values");
  if (runs < 1) throw ParameterError("runs must be at least 1");
  Curve curve;
  curve.parameter_name = parameter_name;
  curve.extra_name = extra_name;
  for (long v : values) {
    double rate = 0.0, extra = 0.0;
    bool has_extra = false;
    for (std::size_t k = 0; k < runs; ++k) {
      // the same run seeds at every parameter value, so points differ only by the parameter
      const auto [r, e] = cell(v, run_seed(seed, k));
      rate += r;
      if (e) {
        extra += *e;
        has_extra = true;
      }
    }
    CurvePoint p;
    p.parameter = v;
    p.mean_rate = rate / static_cast<double>(runs);
    if (has_extra) p.extra = extra / static_cast<double>(runs);
    curve.points.push_back(p);
  }
  return curve;
}

std::string curve_csv(const Curve& curve) {
  std::ostringstream out;
  out << curve.parameter_name << ",mean_rate";
  if (!curve.extra_name.empty()) out << ',' << curve.extra_name;
  out << '\n';
  for (const auto& p : curve.points) {
    out << p.parameter << ',' << text::format_double(p.mean_rate);
    if (!curve.extra_name.empty()) out << ',' << (p.extra ? text::format_double(*p.extra) : "");
    out << '\n';
  }
  return out.str();
}

std::string runs_csv(const RecognitionReport& report) {
  std::ostringstream out;
  out << "classifier,run,true,pred_0,pred_1,pred_2,pred_3\n";
  for (std::size_t k = 0; k < report.runs.size(); ++k) {
    for (std::size_t t = 0; t < kNumEmotions; ++t) {
      out << report.classifier << ',' << k << ',' << t;
      for (long c : report.runs[k].counts[t]) out << ',' << c;
      out << '\n';
    }
  }
  return out.str();
}

std::vector<std::pair<std::string, std::vector<ConfusionMatrix>>> parse_runs_csv(const std::string& text_in) {
  std::vector<std::pair<std::string, std::vector<ConfusionMatrix>>> out;
  std::istringstream in(text_in);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    if (body.starts_with("classifier,")) continue;  // header (repeated when files are concatenated)
    const auto f = text::split(body, ',');
    if (f.size() != 3 + kNumEmotions) {
      throw DataError("runs CSV line " + std::to_string(line_no) + ": expected " + std::to_string(3 + kNumEmotions) +
                      " fields");
    }
    const std::string clf(text::trim(f[0]));
    const auto run = static_cast<std::size_t>(text::parse_int(f[1]));
    const auto truth = static_cast<std::size_t>(code(emotion_from_code(static_cast<int>(text::parse_int(f[2])))));
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == clf; });
    if (it == out.end()) {
      out.emplace_back(clf, std::vector<ConfusionMatrix>{});
      it = std::prev(out.end());
    }
    if (run >= it->second.size()) it->second.resize(run + 1);
    for (std::size_t c = 0; c < kNumEmotions; ++c) {
      const long v = text::parse_int(f[3 + c]);
      if (v < 0) throw DataError("runs CSV line " + std::to_string(line_no) + ": negative count");
      it->second[run].counts[truth][c] = v;
    }
  }
  if (out.empty()) throw DataError("runs CSV contains no rows");
  return out;
}

std::string report_csv(const RecognitionReport& report) {
  std::ostringstream out;
  out << "classifier,row";
  for (Emotion e : kAllEmotions) out << ',' << name(e);
  out << '\n';
  const char* rows[] = {"highest", "lowest", "average"};
  for (int r = 0; r < 3; ++r) {
    out << report.classifier << ',' << rows[r];
    for (std::size_t c = 0; c < kNumEmotions; ++c) {
      const auto& s = report.per_emotion[c];
      out << ',' << text::format_double(r == 0 ? s.highest : r == 1 ? s.lowest : s.average);
    }
    out << '\n';
  }
  out << report.classifier << ",overall_average," << text::format_double(report.overall_average) << ",,,\n";
  return out.str();
}

std::string report_table(const RecognitionReport& report) {
  std::ostringstream out;
  const int label_w = 26, col_w = 11;
  out << report.classifier << " (" << report.runs.size() << " runs)\n";
  out << std::left << std::setw(label_w) << "";
  for (Emotion e : kAllEmotions) out << std::right << std::setw(col_w) << name(e);
  out << '\n';
  const char* rows[] = {"Highest recognition rate", "Lowest recognition rate", "Average recognition rate"};
  for (int r = 0; r < 3; ++r) {
    out << std::left << std::setw(label_w) << rows[r];
    for (std::size_t c = 0; c < kNumEmotions; ++c) {
      const auto& s = report.per_emotion[c];
      out << std::right << std::setw(col_w) << text::format_percent(r == 0 ? s.highest : r == 1 ? s.lowest : s.average);
    }
    out << '\n';
  }
  out << std::left << std::setw(label_w) << "Overall average" << std::right << std::setw(col_w)
      << text::format_percent(report.overall_average) << '\n';
  return out.str();
}

std::string comparison_csv(const std::vector<RecognitionReport>& reports) {
  std::ostringstream out;
  out << "classifier,average_rate\n";
  for (const auto& r : reports) out << r.classifier << ',' << text::format_double(r.overall_average) << '\n';
  return out.str();
}

std::string comparison_table(const std::vector<RecognitionReport>& reports) {
  std::ostringstream out;
  const int w = 14;
  out << std::left << std::setw(26) << "Classifier";
  for (const auto& r : reports) out << std::right << std::setw(w) << r.classifier;
  out << '\n' << std::left << std::setw(26) << "Average recognition rate";
  for (const auto& r : reports) out << std::right << std::setw(w) << text::format_percent(r.overall_average);
  out << '\n';
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "true\\predicted";
  for (Emotion e : kAllEmotions) out << ',' << name(e);
  out << '\n';
  for (Emotion t : kAllEmotions) {
    out << name(t);
    for (long c : cm.counts[idx(t)]) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

}  // namespace ecgemo::eval
