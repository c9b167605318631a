#include "lesionbench/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "lesionbench/error.hpp"

namespace lesionbench {

namespace {

constexpr std::array<std::string_view, kAttributeClassCount> kAttributeNames =
    {"globules", "milia_like_cyst", "negative_network", "pigment_network",
     "streaks"};

constexpr std::array<std::string_view, kDiagnosisClassCount> kLabelNames = {
    "MEL", "NV", "BCC", "AKIEC", "BKL", "DF", "VASC"};

constexpr std::array<AttributeClass, kAttributeClassCount> kAttributeValues = {
    AttributeClass::kGlobules, AttributeClass::kMiliaLikeCyst,
    AttributeClass::kNegativeNetwork, AttributeClass::kPigmentNetwork,
    AttributeClass::kStreaks};

constexpr std::array<DiagnosisLabel, kDiagnosisClassCount> kLabelValues = {
    DiagnosisLabel::kMel, DiagnosisLabel::kNv,  DiagnosisLabel::kBcc,
    DiagnosisLabel::kAkiec, DiagnosisLabel::kBkl, DiagnosisLabel::kDf,
    DiagnosisLabel::kVasc};

}  // namespace

std::string_view attribute_name(AttributeClass cls) {
  return kAttributeNames[static_cast<int>(cls)];
}

std::optional<AttributeClass> attribute_from_name(std::string_view name) {
  for (int i = 0; i < kAttributeClassCount; ++i) {
    if (kAttributeNames[i] == name) return kAttributeValues[i];
  }
  return std::nullopt;
}

std::span<const AttributeClass> all_attribute_classes() {
  return kAttributeValues;
}

std::string_view label_name(DiagnosisLabel label) {
  return kLabelNames[static_cast<int>(label)];
}

std::optional<DiagnosisLabel> label_from_name(std::string_view name) {
  for (int i = 0; i < kDiagnosisClassCount; ++i) {
    if (kLabelNames[i] == name) return kLabelValues[i];
  }
  return std::nullopt;
}

std::span<const DiagnosisLabel> all_labels() { return kLabelValues; }

void ConfusionMatrix::add(DiagnosisLabel actual, DiagnosisLabel predicted,
                          std::uint64_t count) {
  counts_[static_cast<int>(actual)][static_cast<int>(predicted)] += count;
}

std::uint64_t ConfusionMatrix::count(DiagnosisLabel actual,
                                     DiagnosisLabel predicted) const {
  return counts_[static_cast<int>(actual)][static_cast<int>(predicted)];
}

std::uint64_t ConfusionMatrix::row_total(DiagnosisLabel actual) const {
  std::uint64_t total = 0;
  for (auto c : counts_[static_cast<int>(actual)]) total += c;
  return total;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t total = 0;
  for (auto label : kLabelValues) total += row_total(label);
  return total;
}

std::array<std::array<double, kDiagnosisClassCount>, kDiagnosisClassCount>
ConfusionMatrix::row_normalized() const {
  std::array<std::array<double, kDiagnosisClassCount>, kDiagnosisClassCount>
      out{};
  for (int i = 0; i < kDiagnosisClassCount; ++i) {
    std::uint64_t total = row_total(static_cast<DiagnosisLabel>(i));
    if (total == 0) continue;
    for (int j = 0; j < kDiagnosisClassCount; ++j) {
      out[i][j] =
          static_cast<double>(counts_[i][j]) / static_cast<double>(total);
    }
  }
  return out;
}

double boundary_score(std::span<const MaskPair> pairs) {
  if (pairs.empty()) {
    throw UndefinedScoreError("boundary score over an empty pair list");
  }
  double sum = 0.0;
  for (const auto& pair : pairs) {
    sum += jaccard(pair.ground_truth, pair.predicted);
  }
  return sum / static_cast<double>(pairs.size());
}

std::optional<double> attribute_class_score(std::span<const MaskPair> pairs,
                                            AttributeClass) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& pair : pairs) {
    if (pair.ground_truth.empty()) continue;  // excluded from N(j)
    sum += jaccard(pair.ground_truth, pair.predicted);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

double attribute_overall_score(
    const std::array<std::optional<double>, kAttributeClassCount>& per_class) {
  double sum = 0.0;
  for (int j = 0; j < kAttributeClassCount; ++j) {
    if (!per_class[j].has_value()) {
      throw UndefinedScoreError(
          "attribute score undefined for class " +
          std::string(attribute_name(static_cast<AttributeClass>(j))) +
          " (no non-empty ground truths)");
    }
    sum += *per_class[j];
  }
  return sum / kAttributeClassCount;
}

double diagnosis_accuracy(std::span<const DiagnosisLabel> predictions,
                          std::span<const DiagnosisLabel> truths) {
  if (predictions.size() != truths.size()) {
    throw DimensionError("prediction/truth length mismatch: " +
                         std::to_string(predictions.size()) + " vs " +
                         std::to_string(truths.size()));
  }
  if (predictions.empty()) {
    throw UndefinedScoreError("diagnosis accuracy over empty lists");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truths[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

ConfusionMatrix confusion(std::span<const DiagnosisLabel> predictions,
                          std::span<const DiagnosisLabel> truths) {
  if (predictions.size() != truths.size()) {
    throw DimensionError("prediction/truth length mismatch: " +
                         std::to_string(predictions.size()) + " vs " +
                         std::to_string(truths.size()));
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    cm.add(truths[i], predictions[i]);
  }
  return cm;
}

double balanced_accuracy(const ConfusionMatrix& cm,
                         std::vector<std::string>* warnings) {
  auto normalized = cm.row_normalized();
  double sum = 0.0;
  int included = 0;
  for (auto label : all_labels()) {
    int i = static_cast<int>(label);
    if (cm.row_total(label) == 0) {
      if (warnings) {
        warnings->push_back("class " + std::string(label_name(label)) +
                            " has no samples; excluded from balanced accuracy");
      }
      continue;
    }
    sum += normalized[i][i];
    ++included;
  }
  if (included == 0) {
    throw UndefinedScoreError("balanced accuracy over an empty matrix");
  }
  return sum / included;
}

double round_half_up(double value, int decimals) {
  double factor = std::pow(10.0, decimals);
  return std::floor(value * factor + 0.5) / factor;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals,
                round_half_up(value, decimals));
  return buf;
}

}  // namespace lesionbench
