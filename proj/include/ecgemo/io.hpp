#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "ecgemo/dsp.hpp"
#include "ecgemo/features.hpp"
#include "ecgemo/forest.hpp"
#include "ecgemo/knn.hpp"
#include "ecgemo/signal.hpp"
#include "ecgemo/svm.hpp"

namespace ecgemo::io {

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, const std::string& contents);

// Signal CSV: "label,subject,fs", one metadata row, then one sample per line.
std::string signal_to_csv(const SignalRecord& record);
SignalRecord signal_from_csv(const std::string& text);

// Feature CSV: "label,f1..fn", one vector per row.
std::string features_to_csv(const std::vector<features::FeatureVector>& vectors);
std::vector<features::FeatureVector> features_from_csv(const std::string& text);

// Filter taps with a "# fs=..,low=..,high=..,window=.." comment header.
std::string filter_to_csv(const dsp::FirFilter& filter);
dsp::FirFilter filter_from_csv(const std::string& text);

std::string svm_to_text(const svm::MulticlassSvmModel& model);
svm::MulticlassSvmModel svm_from_text(const std::string& text);

std::string forest_to_text(const forest::ForestModel& model);
forest::ForestModel forest_from_text(const std::string& text);

std::string knn_to_text(const knn::KnnModel& model);
knn::KnnModel knn_from_text(const std::string& text);

using Model = std::variant<svm::MulticlassSvmModel, forest::ForestModel, knn::KnnModel>;

/// Dispatches on the first header token (svm / forest / knn).
Model model_from_text(const std::string& text);
std::string model_to_text(const Model& model);
Emotion predict(const Model& model, const std::vector<double>& x);

std::string predictions_to_csv(const std::vector<Emotion>& labels);
std::vector<Emotion> predictions_from_csv(const std::string& text);

}  // namespace ecgemo::io
