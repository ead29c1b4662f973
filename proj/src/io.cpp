#include "ecgemo/io.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ecgemo/error.hpp"
#include "ecgemo/text.hpp"

namespace ecgemo::io {
namespace {

using text::format_double;
using text::parse_double;
using text::parse_int;

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

// "key=value" tokens after a fixed prefix, e.g. "svm v1 classes=4 gamma=..".
std::map<std::string, std::string> header_keys(const std::string& line, const std::string& kind) {
  std::istringstream in(line);
  std::string word, version;
  in >> word >> version;
  if (word != kind) throw DataError("expected a '" + kind + "' model header, got '" + word + "'");
  if (version != "v1") throw DataError("unsupported " + kind + " model version '" + version + "'");
  std::map<std::string, std::string> keys;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw DataError("malformed header token '" + tok + "'");
    keys[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return keys;
}

const std::string& require(const std::map<std::string, std::string>& keys, const std::string& k) {
  const auto it = keys.find(k);
  if (it == keys.end()) throw DataError("model header lacks '" + k + "'");
  return it->second;
}

std::vector<double> parse_row(std::string_view line, std::size_t line_no) {
  std::vector<double> v;
  for (auto f : text::split(line, ',')) {
    try {
      v.push_back(parse_double(f));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return v;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string signal_to_csv(const SignalRecord& record) {
  std::string out = "label,subject,fs\n";
  out += std::to_string(code(record.label())) + "," + std::to_string(record.subject_id()) + "," +
         format_double(record.sample_rate_hz()) + "\n";
  for (double v : record.samples()) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

SignalRecord signal_from_csv(const std::string& s) {
  const auto lines = lines_of(s);
  if (lines.size() < 3 || text::trim(lines[0]) != "label,subject,fs") {
    throw DataError("signal CSV must start with 'label,subject,fs', a metadata row and samples");
  }
  const auto meta = text::split(lines[1], ',');
  if (meta.size() != 3) throw DataError("signal CSV metadata row must have 3 fields");
  const Emotion label = emotion_from_code(static_cast<int>(parse_int(meta[0])));
  const auto subject = static_cast<int>(parse_int(meta[1]));
  const double fs = parse_double(meta[2]);
  std::vector<double> samples;
  samples.reserve(lines.size() - 2);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      samples.push_back(parse_double(lines[i]));
    } catch (const DataError& e) {
      throw DataError("signal CSV line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (samples.empty()) throw DataError("signal CSV has no samples");
  if (!(fs > 0.0)) throw DataError("signal CSV sample rate must be positive");
  return SignalRecord(std::move(samples), fs, label, subject);
}

std::string features_to_csv(const std::vector<features::FeatureVector>& vectors) {
  if (vectors.empty()) throw ParameterError("no feature vectors to write");
  const std::size_t n = vectors.front().values.size();
  std::string out = "label";
  for (std::size_t j = 1; j <= n; ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (const auto& v : vectors) {
    if (v.values.size() != n) throw ParameterError("feature vectors differ in length");
    out += std::to_string(code(v.label));
    for (double x : v.values) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

std::vector<features::FeatureVector> features_from_csv(const std::string& s) {
  const auto lines = lines_of(s);
  if (lines.empty() || !text::trim(lines[0]).starts_with("label")) {
    throw DataError("feature CSV must start with a 'label,f1..fn' header");
  }
  const std::size_t n = text::split(lines[0], ',').size() - 1;
  if (n == 0) throw DataError("feature CSV header declares no features");
  std::vector<features::FeatureVector> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    auto row = parse_row(lines[i], i + 1);
    if (row.size() != n + 1) {
      throw DataError("feature CSV line " + std::to_string(i + 1) + ": expected " + std::to_string(n + 1) + " fields");
    }
    if (row[0] != static_cast<double>(static_cast<int>(row[0]))) {
      throw DataError("feature CSV line " + std::to_string(i + 1) + ": non-integer label");
    }
    features::FeatureVector v;
    v.label = emotion_from_code(static_cast<int>(row[0]));
    v.values.assign(row.begin() + 1, row.end());
    out.push_back(std::move(v));
  }
  if (out.empty()) throw DataError("feature CSV has no rows");
  return out;
}

std::string filter_to_csv(const dsp::FirFilter& f) {
  std::string out = "# fs=" + format_double(f.sample_rate_hz) + ",low=" + format_double(f.low_cut_hz) +
                    ",high=" + format_double(f.high_cut_hz) + ",window=" + std::string(dsp::to_string(f.window)) + "\n";
  for (double t : f.taps) out += format_double(t) + "\n";
  return out;
}

dsp::FirFilter filter_from_csv(const std::string& s) {
  const auto lines = lines_of(s);
  if (lines.empty() || !lines[0].starts_with("#")) throw DataError("filter CSV must start with a '# fs=..' comment");
  dsp::FirFilter f;
  for (auto kv : text::split(text::trim(std::string_view(lines[0]).substr(1)), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw DataError("malformed filter header field");
    const auto key = text::trim(kv.substr(0, eq));
    const auto val = kv.substr(eq + 1);
    if (key == "fs") f.sample_rate_hz = parse_double(val);
    else if (key == "low") f.low_cut_hz = parse_double(val);
    else if (key == "high") f.high_cut_hz = parse_double(val);
    else if (key == "window") f.window = dsp::parse_window(val);
    else throw DataError("unknown filter header key '" + std::string(key) + "'");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!text::trim(lines[i]).empty()) f.taps.push_back(parse_double(lines[i]));
  }
  if (f.taps.size() < 3 || f.taps.size() % 2 == 0) throw DataError("filter must have an odd number (>= 3) of taps");
  return f;
}

std::string svm_to_text(const svm::MulticlassSvmModel& model) {
  std::ostringstream out;
  out << "svm v1 classes=" << kNumEmotions << " gamma=" << format_double(model.params.gamma)
      << " c=" << format_double(model.params.c) << " tolerance=" << format_double(model.params.tolerance) << '\n';
  for (const auto& p : model.pairs) {
    out << "pair " << code(p.positive) << ' ' << code(p.negative) << '\n';
    out << "bias " << format_double(p.model.bias) << '\n';
    out << "sv " << p.model.support_vectors.size() << '\n';
    for (std::size_t i = 0; i < p.model.support_vectors.size(); ++i) {
      out << format_double(p.model.dual_coefs[i]);
      for (double v : p.model.support_vectors[i]) out << ',' << format_double(v);
      out << '\n';
    }
  }
  return out.str();
}

svm::MulticlassSvmModel svm_from_text(const std::string& s) {
  const auto lines = lines_of(s);
  if (lines.empty()) throw DataError("empty SVM model file");
  const auto keys = header_keys(lines[0], "svm");
  if (parse_int(require(keys, "classes")) != static_cast<long long>(kNumEmotions)) {
    throw DataError("SVM model must have 4 classes");
  }
  svm::MulticlassSvmModel model;
  model.params.gamma = parse_double(require(keys, "gamma"));
  model.params.c = parse_double(require(keys, "c"));
  if (keys.count("tolerance")) model.params.tolerance = parse_double(keys.at("tolerance"));
  std::size_t i = 1;
  auto expect = [&](const std::string& word) -> std::string {
    while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    if (i >= lines.size() || !lines[i].starts_with(word + " ")) {
      throw DataError("SVM model line " + std::to_string(i + 1) + ": expected '" + word + "'");
    }
    return lines[i++].substr(word.size() + 1);
  };
  while (true) {
    while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    if (i >= lines.size()) break;
    const auto pair = text::split(text::trim(expect("pair")), ' ');
    if (pair.size() != 2) throw DataError("SVM model: malformed pair line");
    svm::PairModel pm{emotion_from_code(static_cast<int>(parse_int(pair[0]))),
                      emotion_from_code(static_cast<int>(parse_int(pair[1]))), {}};
    pm.model.params = model.params;
    pm.model.bias = parse_double(expect("bias"));
    const auto count = static_cast<std::size_t>(parse_int(expect("sv")));
    for (std::size_t k = 0; k < count; ++k, ++i) {
      if (i >= lines.size()) throw DataError("SVM model truncated inside a support-vector block");
      auto row = parse_row(lines[i], i + 1);
      if (row.size() < 2) throw DataError("SVM model line " + std::to_string(i + 1) + ": too few fields");
      pm.model.dual_coefs.push_back(row[0]);
      pm.model.support_vectors.emplace_back(row.begin() + 1, row.end());
      if (pm.model.support_vectors.back().size() != pm.model.support_vectors.front().size()) {
        throw DataError("SVM model line " + std::to_string(i + 1) + ": dimension mismatch");
      }
    }
    pm.model.converged = true;
    model.pairs.push_back(std::move(pm));
  }
  if (model.pairs.size() != kNumEmotions * (kNumEmotions - 1) / 2) {
    throw DataError("SVM model must contain 6 pairwise models, found " + std::to_string(model.pairs.size()));
  }
  return model;
}

std::string forest_to_text(const forest::ForestModel& model) {
  std::ostringstream out;
  out << "forest v1 trees=" << model.trees.size() << " features_per_split=" << model.features_per_split
      << " dimension=" << model.dimension;
  if (model.oob_error) out << " oob_error=" << format_double(*model.oob_error);
  out << '\n';
  for (const auto& tree : model.trees) {
    out << "tree " << tree.nodes.size() << '\n';
    std::function<void(int)> emit = [&](int id) {
      const auto& n = tree.nodes[static_cast<std::size_t>(id)];
      if (n.feature < 0) {
        out << "leaf";
      } else {
        out << "split " << n.feature << ' ' << format_double(n.threshold);
      }
      for (int c : n.class_counts) out << ' ' << c;
      out << '\n';
      if (n.feature >= 0) {
        emit(n.left);
        emit(n.right);
      }
    };
    emit(0);
  }
  return out.str();
}

forest::ForestModel forest_from_text(const std::string& s) {
  const auto lines = lines_of(s);
  if (lines.empty()) throw DataError("empty forest model file");
  const auto keys = header_keys(lines[0], "forest");
  forest::ForestModel model;
  const auto num_trees = static_cast<std::size_t>(parse_int(require(keys, "trees")));
  model.features_per_split = static_cast<std::size_t>(parse_int(require(keys, "features_per_split")));
  model.dimension = static_cast<std::size_t>(parse_int(require(keys, "dimension")));
  if (keys.count("oob_error")) model.oob_error = parse_double(keys.at("oob_error"));

  std::size_t i = 1;
  for (std::size_t t = 0; t < num_trees; ++t) {
    if (i >= lines.size() || !lines[i].starts_with("tree ")) throw DataError("forest model: expected 'tree' line");
    const auto count = static_cast<std::size_t>(parse_int(lines[i].substr(5)));
    ++i;
    forest::DecisionTree tree;
    std::function<int()> read = [&]() -> int {
      if (i >= lines.size() || tree.nodes.size() >= count) throw DataError("forest model: truncated tree");
      const auto f = text::split(text::trim(lines[i]), ' ');
      const std::size_t line_no = ++i;
      const int id = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      forest::Node node;
      std::size_t first_count;
      if (f[0] == "leaf") {
        first_count = 1;
      } else if (f[0] == "split" && f.size() >= 3) {
        node.feature = static_cast<int>(parse_int(f[1]));
        node.threshold = parse_double(f[2]);
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= model.dimension) {
          throw DataError("forest model line " + std::to_string(line_no) + ": feature index out of range");
        }
        first_count = 3;
      } else {
        throw DataError("forest model line " + std::to_string(line_no) + ": expected 'leaf' or 'split'");
      }
      if (f.size() != first_count + kNumEmotions) {
        throw DataError("forest model line " + std::to_string(line_no) + ": expected 4 class counts");
      }
      for (std::size_t c = 0; c < kNumEmotions; ++c) node.class_counts[c] = static_cast<int>(parse_int(f[first_count + c]));
      if (node.feature >= 0) {
        node.left = read();
        node.right = read();
      }
      tree.nodes[static_cast<std::size_t>(id)] = node;
      return id;
    };
    read();
    if (tree.nodes.size() != count) throw DataError("forest model: node count mismatch");
    model.trees.push_back(std::move(tree));
  }
  if (model.trees.empty()) throw DataError("forest model has no trees");
  return model;
}

std::string knn_to_text(const knn::KnnModel& model) {
  std::vector<features::FeatureVector> rows;
  rows.reserve(model.points().size());
  for (std::size_t i = 0; i < model.points().size(); ++i) {
    rows.push_back({model.points()[i], model.labels()[i], {}});
  }
  return "knn v1 k=" + std::to_string(model.k()) + " metric=" + knn::to_string(model.metric()) + "\n" +
         features_to_csv(rows);
}

knn::KnnModel knn_from_text(const std::string& s) {
  const auto nl = s.find('\n');
  if (nl == std::string::npos) throw DataError("knn model lacks training data");
  std::string header = s.substr(0, nl);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto keys = header_keys(header, "knn");
  const auto k = static_cast<std::size_t>(parse_int(require(keys, "k")));
  const auto metric = knn::parse_metric(require(keys, "metric"));
  return knn::KnnModel(features_from_csv(s.substr(nl + 1)), k, metric);
}

Model model_from_text(const std::string& s) {
  std::istringstream in(s);
  std::string kind;
  in >> kind;
  if (kind == "svm") return svm_from_text(s);
  if (kind == "forest") return forest_from_text(s);
  if (kind == "knn") return knn_from_text(s);
  throw DataError("unrecognised model file (header '" + kind + "')");
}

std::string model_to_text(const Model& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, svm::MulticlassSvmModel>) return svm_to_text(m);
        else if constexpr (std::is_same_v<T, forest::ForestModel>) return forest_to_text(m);
        else return knn_to_text(m);
      },
      model);
}

Emotion predict(const Model& model, const std::vector<double>& x) {
  return std::visit(
      [&](const auto& m) -> Emotion {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, svm::MulticlassSvmModel>) return svm::predict_multiclass(m, x);
        else if constexpr (std::is_same_v<T, forest::ForestModel>) return forest::predict_forest(m, x);
        else return m.predict(x);
      },
      model);
}

std::string predictions_to_csv(const std::vector<Emotion>& labels) {
  std::string out = "label\n";
  for (Emotion e : labels) out += std::to_string(code(e)) + "\n";
  return out;
}

std::vector<Emotion> predictions_from_csv(const std::string& s) {
  const auto lines = lines_of(s);
  if (lines.empty() || text::trim(lines[0]) != "label") throw DataError("prediction CSV must start with 'label'");
  std::vector<Emotion> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!text::trim(lines[i]).empty()) out.push_back(emotion_from_code(static_cast<int>(parse_int(lines[i]))));
  }
  return out;
}

}  // namespace ecgemo::io
