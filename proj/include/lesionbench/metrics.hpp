#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lesionbench/mask.hpp"

namespace lesionbench {

/// The 5 dermoscopic attribute classes of task 2, in the fixed order used
/// for per-class scores and file naming.
enum class AttributeClass : int {
  kGlobules = 0,
  kMiliaLikeCyst = 1,
  kNegativeNetwork = 2,
  kPigmentNetwork = 3,
  kStreaks = 4,
};
inline constexpr int kAttributeClassCount = 5;

std::string_view attribute_name(AttributeClass cls);
std::optional<AttributeClass> attribute_from_name(std::string_view name);
std::span<const AttributeClass> all_attribute_classes();

/// The 7 disease classes of task 3. Order matches the confusion-matrix
/// axes and the ground-truth CSV columns.
enum class DiagnosisLabel : int {
  kMel = 0,
  kNv = 1,
  kBcc = 2,
  kAkiec = 3,
  kBkl = 4,
  kDf = 5,
  kVasc = 6,
};
inline constexpr int kDiagnosisClassCount = 7;

std::string_view label_name(DiagnosisLabel label);
std::optional<DiagnosisLabel> label_from_name(std::string_view name);
std::span<const DiagnosisLabel> all_labels();

/// One scored sample: a ground-truth mask and the prediction for it.
struct MaskPair {
  BinaryMask ground_truth;
  BinaryMask predicted;
  std::string image_id;
};

/// 7x7 actual-vs-predicted count table. Rows are actual classes.
class ConfusionMatrix {
 public:
  void add(DiagnosisLabel actual, DiagnosisLabel predicted,
           std::uint64_t count = 1);

  std::uint64_t count(DiagnosisLabel actual, DiagnosisLabel predicted) const;
  std::uint64_t row_total(DiagnosisLabel actual) const;
  std::uint64_t total() const;

  /// Each row divided by its total; rows with zero samples stay all-zero.
  std::array<std::array<double, kDiagnosisClassCount>, kDiagnosisClassCount>
  row_normalized() const;

 private:
  std::array<std::array<std::uint64_t, kDiagnosisClassCount>,
             kDiagnosisClassCount>
      counts_{};
};

/// S1: arithmetic mean of per-pair Jaccard indices. Throws
/// UndefinedScoreError on an empty list.
double boundary_score(std::span<const MaskPair> pairs);

/// S2(j): mean Jaccard over pairs whose ground truth is non-empty; pairs
/// with an empty ground-truth mask count toward neither the numerator nor
/// N(j). Returns nullopt when N(j) == 0.
std::optional<double> attribute_class_score(std::span<const MaskPair> pairs,
                                            AttributeClass cls);

/// S2: unweighted mean of the 5 per-class scores. Throws
/// UndefinedScoreError naming the first undefined class.
double attribute_overall_score(
    const std::array<std::optional<double>, kAttributeClassCount>& per_class);

/// S3: fraction of positions where prediction equals truth.
double diagnosis_accuracy(std::span<const DiagnosisLabel> predictions,
                          std::span<const DiagnosisLabel> truths);

ConfusionMatrix confusion(std::span<const DiagnosisLabel> predictions,
                          std::span<const DiagnosisLabel> truths);

/// Normalized multi-class accuracy: mean per-class recall, i.e. the mean
/// of the row-normalized diagonal. Classes with zero samples are excluded
/// from the mean; each exclusion appends a message to `warnings` when
/// given. Throws UndefinedScoreError when every row is empty.
double balanced_accuracy(const ConfusionMatrix& cm,
                         std::vector<std::string>* warnings = nullptr);

/// Round-half-up to `decimals` places (reports print 4 decimals).
double round_half_up(double value, int decimals);

/// Locale-independent fixed-point formatting with half-up rounding.
std::string format_fixed(double value, int decimals);

}  // namespace lesionbench
