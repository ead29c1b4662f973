#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecgemo/config.hpp"
#include "ecgemo/error.hpp"
#include "ecgemo/eval.hpp"
#include "ecgemo/io.hpp"
#include "ecgemo/pipeline.hpp"
#include "ecgemo/random.hpp"
#include "ecgemo/text.hpp"

namespace fs = std::filesystem;
using namespace ecgemo;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, const std::string& out_help) {
  sub->add_option("--config", c.config_path, "key = value configuration file");
  sub->add_option("--seed", c.seed, "master seed (overrides the config)");
  sub->add_option("--set", c.overrides, "extra key=value override, repeatable");
  sub->add_option("--out", c.out, out_help);
}

PipelineConfig load_config(const Common& c) {
  PipelineConfig config = c.config_path.empty() ? PipelineConfig{} : parse_config(io::read_file(c.config_path));
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    set_option(config, std::string(text::trim(kv.substr(0, eq))), std::string(text::trim(kv.substr(eq + 1))));
  }
  if (c.seed) config.seed = *c.seed;
  config.validate();
  return config;
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

/// Writes to `path`, or to stdout when the path is empty.
void emit(const std::string& path, const std::string& contents) {
  if (path.empty()) std::cout << contents;
  else io::write_file(path, contents);
}

std::string signal_file_name(const SignalRecord& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "subject%02d_%d_%s.csv", r.subject_id(), code(r.label()),
                std::string(name(r.label())).c_str());
  return buf;
}

std::vector<SignalRecord> load_signals(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SignalRecord> records;
  for (const auto& f : files) {
    try {
      records.push_back(io::signal_from_csv(io::read_file(f)));
    } catch (const DataError& e) {
      throw DataError(f.filename().string() + ": " + e.what());
    }
  }
  if (records.empty()) throw DataError("no signal CSVs in " + dir.string());
  std::stable_sort(records.begin(), records.end(), [](const SignalRecord& a, const SignalRecord& b) {
    return std::pair(a.subject_id(), code(a.label())) < std::pair(b.subject_id(), code(b.label()));
  });
  return records;
}

/// Filtered records, loaded from `signals_dir` or synthesised from the config.
std::vector<SignalRecord> prepared_records(const PipelineConfig& config, const std::string& signals_dir) {
  const auto raw = signals_dir.empty() ? pipeline::synthesize(config) : load_signals(signals_dir);
  if (config.apply_filter) {
    const auto filter = pipeline::make_filter(config);
    if (filter.warning) warn(*filter.warning);
  }
  return pipeline::preprocess(config, raw);
}

std::vector<features::FeatureVector> load_features(const std::string& path) {
  return io::features_from_csv(io::read_file(path));
}

std::string trace_csv(const pso::PsoResult& search) {
  std::ostringstream out;
  out << "iteration,particle,c,gamma,fitness,global_best_fitness\n";
  for (const auto& row : search.trace) {
    out << row.iteration << ',' << row.particle << ',' << text::format_double(std::pow(10.0, row.position[0])) << ','
        << text::format_double(std::pow(10.0, row.position[1])) << ',' << text::format_double(row.fitness) << ','
        << text::format_double(row.global_best_fitness) << '\n';
  }
  return out.str();
}

void print_curve_summary(const eval::Curve& curve) {
  std::cerr << "best " << curve.parameter_name << " = " << curve.best_parameter() << '\n';
}

// --- subcommands ---

void cmd_synth(const Common& c) {
  if (c.out.empty()) throw UsageError("synth needs --out DIR");
  const auto config = load_config(c);
  for (const auto& r : pipeline::synthesize(config)) {
    io::write_file(fs::path(c.out) / signal_file_name(r), io::signal_to_csv(r));
  }
}

void cmd_filter(const Common& c, const std::string& in_dir, const std::string& taps_path) {
  if (c.out.empty()) throw UsageError("filter needs --out DIR");
  const auto config = load_config(c);
  const auto filter = pipeline::make_filter(config);
  if (filter.warning) warn(*filter.warning);
  for (const auto& r : load_signals(in_dir)) {
    io::write_file(fs::path(c.out) / signal_file_name(r), io::signal_to_csv(dsp::apply(filter, r)));
  }
  if (!taps_path.empty()) io::write_file(taps_path, io::filter_to_csv(filter));
}

void cmd_extract(const Common& c, const std::string& in_dir) {
  if (c.out.empty()) throw UsageError("extract needs --out DIR");
  const auto config = load_config(c);
  const auto records = load_signals(in_dir);
  const auto pool = pipeline::feature_pool(config, records, config.feature_count);
  const auto run = eval::run_seed(config.seed, 0);
  const auto ds = pipeline::make_dataset(config, pool, derive_seed(run, tag("dataset")));
  for (const auto& w : ds.warnings) warn(w);
  io::write_file(fs::path(c.out) / "train.csv", io::features_to_csv(ds.train));
  io::write_file(fs::path(c.out) / "test.csv", io::features_to_csv(ds.test));
}

void cmd_tune(const Common& c, const std::string& features_path) {
  const auto config = load_config(c);
  const auto train = load_features(features_path);
  const auto run = eval::run_seed(config.seed, 0);
  const auto result = pso::tune_svm(train, pipeline::pso_config(config, derive_seed(run, tag("pso"))), config.svm);
  emit(c.out, trace_csv(result.search));
  std::cerr << "c = " << text::format_double(result.c) << ", gamma = " << text::format_double(result.gamma)
            << ", fitness = " << text::format_double(result.fitness) << '\n';
}

void cmd_train(const Common& c, const std::string& classifier, const std::string& features_path,
               const std::string& model_path, const std::string& trace_path) {
  if (model_path.empty()) throw UsageError("train needs --model FILE");
  const auto config = load_config(c);
  const auto kind = classifier.empty() ? config.classifier : parse_classifier(classifier);
  const auto train = load_features(features_path);
  const auto trained = pipeline::train(config, kind, train, eval::run_seed(config.seed, 0));
  io::write_file(model_path, io::model_to_text(trained.model));
  if (trained.tuning) {
    std::cerr << "tuned c = " << text::format_double(trained.tuning->c)
              << ", gamma = " << text::format_double(trained.tuning->gamma) << '\n';
    if (!trace_path.empty()) io::write_file(trace_path, trace_csv(trained.tuning->search));
  }
}

void cmd_predict(const Common& c, const std::string& model_path, const std::string& features_path) {
  const auto model = io::model_from_text(io::read_file(model_path));
  emit(c.out, io::predictions_to_csv(pipeline::predict_all(model, load_features(features_path))));
}

void write_report(const std::string& dir, const eval::RecognitionReport& report) {
  io::write_file(fs::path(dir) / ("runs_" + report.classifier + ".csv"), eval::runs_csv(report));
  io::write_file(fs::path(dir) / ("report_" + report.classifier + ".csv"), eval::report_csv(report));
}

void cmd_evaluate(const Common& c, const std::string& model_path, const std::string& features_path,
                  const std::vector<std::string>& classifiers, const std::string& signals_dir) {
  if (!model_path.empty()) {
    if (features_path.empty()) throw UsageError("evaluate --model needs --features FILE");
    const auto model = io::model_from_text(io::read_file(model_path));
    const auto cm = pipeline::evaluate(model, load_features(features_path));
    emit(c.out, eval::confusion_csv(cm));
    std::cerr << "accuracy = " << text::format_percent(cm.accuracy()) << '\n';
    return;
  }
  if (c.out.empty()) throw UsageError("evaluate without --model needs --out DIR");
  const auto config = load_config(c);
  std::vector<ClassifierKind> kinds;
  for (const auto& name : classifiers) kinds.push_back(parse_classifier(name));
  if (kinds.empty()) kinds.push_back(config.classifier);

  const auto records = prepared_records(config, signals_dir);
  const auto pool = pipeline::feature_pool(config, records, config.feature_count);
  std::vector<eval::RecognitionReport> reports;
  for (auto kind : kinds) {
    reports.push_back(pipeline::evaluate_repeated(config, kind, pool));
    write_report(c.out, reports.back());
    std::cout << eval::report_table(reports.back()) << '\n';
  }
  io::write_file(fs::path(c.out) / "comparison.csv", eval::comparison_csv(reports));
  std::cout << eval::comparison_table(reports);
}

void cmd_sweep(const Common& c, const std::string& which, const std::string& signals_dir) {
  const auto config = load_config(c);
  const auto records = prepared_records(config, signals_dir);
  eval::Curve curve;
  if (which == "features") {
    curve = pipeline::sweep_features(config, records);
  } else {
    const auto pool = pipeline::feature_pool(config, records, config.feature_count);
    curve = which == "trees" ? pipeline::sweep_trees(config, pool) : pipeline::sweep_k(config, pool);
  }
  emit(c.out, eval::curve_csv(curve));
  print_curve_summary(curve);
}

void cmd_report(const Common& c, const std::vector<std::string>& run_files) {
  if (run_files.empty()) throw UsageError("report needs at least one --runs FILE");
  std::string all;
  for (const auto& f : run_files) all += io::read_file(f);
  const bool weighted = !c.config_path.empty() && load_config(c).weighted_average;
  std::vector<eval::RecognitionReport> reports;
  for (const auto& [classifier, runs] : eval::parse_runs_csv(all)) {
    reports.push_back(eval::summarize(classifier, runs, weighted));
    std::cout << eval::report_table(reports.back()) << '\n';
    if (!c.out.empty()) {
      io::write_file(fs::path(c.out) / ("report_" + classifier + ".csv"), eval::report_csv(reports.back()));
    }
  }
  std::cout << eval::comparison_table(reports);
  if (!c.out.empty()) io::write_file(fs::path(c.out) / "comparison.csv", eval::comparison_csv(reports));
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch == '\n' ? ' ' : ch;
  }
  return out;
}

int fail(const char* kind, int code, const std::string& message) {
  std::cerr << "error: kind=" << kind << " message=\"" << escape(message) << "\"\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECG emotion recognition pipeline on synthetic recordings"};
  app.require_subcommand(1);
  Common common;

  auto* synth = app.add_subcommand("synth", "generate noisy synthetic recordings (subjects x 4 emotions)");
  add_common(synth, common, "output directory for signal CSVs");

  std::string in_dir, taps_path;
  auto* filter = app.add_subcommand("filter", "band-pass filter every signal CSV in a directory");
  add_common(filter, common, "output directory for filtered signal CSVs");
  filter->add_option("--in", in_dir, "directory of signal CSVs")->required();
  filter->add_option("--taps", taps_path, "also write the filter taps to this CSV");

  auto* extract = app.add_subcommand("extract", "segment, DCT and sample balanced train/test feature CSVs");
  add_common(extract, common, "output directory for train.csv and test.csv");
  extract->add_option("--in", in_dir, "directory of (filtered) signal CSVs")->required();

  std::string features_path;
  auto* tune = app.add_subcommand("tune", "PSO search for the SVM (C, gamma); writes the search trace CSV");
  tune->alias("pso-tune");
  add_common(tune, common, "trace CSV (default stdout)");
  tune->add_option("--features", features_path, "training feature CSV")->required();

  std::string classifier, model_path, trace_path;
  auto* train = app.add_subcommand("train", "train a classifier and save the model");
  add_common(train, common, "unused");
  train->add_option("--classifier", classifier, "svm, forest or knn (default from config)");
  train->add_option("--features", features_path, "training feature CSV")->required();
  train->add_option("--model", model_path, "model file to write")->required();
  train->add_option("--trace", trace_path, "PSO trace CSV when the SVM is tuned");

  auto* predict = app.add_subcommand("predict", "predict labels for a feature CSV");
  add_common(predict, common, "prediction CSV (default stdout)");
  predict->add_option("--model", model_path, "model file")->required();
  predict->add_option("--features", features_path, "feature CSV")->required();

  std::vector<std::string> classifiers;
  std::string signals_dir;
  auto* evaluate = app.add_subcommand(
      "evaluate", "confusion matrix of a saved model, or the repeated-run protocol when --model is omitted");
  add_common(evaluate, common, "confusion CSV (with --model) or output directory (protocol)");
  evaluate->add_option("--model", model_path, "model file");
  evaluate->add_option("--features", features_path, "test feature CSV");
  evaluate->add_option("--classifier", classifiers, "classifier(s) for the protocol, repeatable");
  evaluate->add_option("--signals", signals_dir, "raw signal directory instead of synthesising");

  std::array<CLI::App*, 3> sweeps{};
  const std::array<std::string, 3> sweep_names{"features", "trees", "k"};
  const std::array<std::string, 3> sweep_help{"mean recognition rate against DCT feature count",
                                              "forest rate and generalization error against tree count",
                                              "K-NN rate and cross-validated loss against k"};
  for (std::size_t i = 0; i < 3; ++i) {
    sweeps[i] = app.add_subcommand("sweep-" + sweep_names[i], sweep_help[i]);
    add_common(sweeps[i], common, "curve CSV (default stdout)");
    sweeps[i]->add_option("--signals", signals_dir, "raw signal directory instead of synthesising");
  }

  std::vector<std::string> run_files;
  auto* report = app.add_subcommand("report", "render recognition tables from stored runs CSVs");
  add_common(report, common, "directory for report and comparison CSVs");
  report->add_option("--runs", run_files, "runs CSV written by evaluate, repeatable")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", 1, e.what());
  }

  try {
    if (synth->parsed()) cmd_synth(common);
    else if (filter->parsed()) cmd_filter(common, in_dir, taps_path);
    else if (extract->parsed()) cmd_extract(common, in_dir);
    else if (tune->parsed()) cmd_tune(common, features_path);
    else if (train->parsed()) cmd_train(common, classifier, features_path, model_path, trace_path);
    else if (predict->parsed()) cmd_predict(common, model_path, features_path);
    else if (evaluate->parsed()) cmd_evaluate(common, model_path, features_path, classifiers, signals_dir);
    else if (report->parsed()) cmd_report(common, run_files);
    else {
      for (std::size_t i = 0; i < 3; ++i) {
        if (sweeps[i]->parsed()) cmd_sweep(common, sweep_names[i], signals_dir);
      }
    }
  } catch (const Error& e) {
    return fail(to_string(e.kind()), static_cast<int>(e.kind()), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail("io", 2, e.what());
  } catch (const std::exception& e) {
    return fail("data", 3, e.what());
  }
  return 0;
}
