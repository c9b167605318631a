#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lesionbench/mask.hpp"
#include "lesionbench/metrics.hpp"

namespace lesionbench {

/// Exactly one mask per disease class, all the same shape.
class ClassMaskSet {
 public:
  explicit ClassMaskSet(std::array<BinaryMask, kDiagnosisClassCount> masks);
  static ClassMaskSet all_empty(int width, int height);

  const BinaryMask& mask(DiagnosisLabel label) const {
    return masks_[static_cast<int>(label)];
  }
  void replace(DiagnosisLabel label, BinaryMask mask);

  int width() const { return masks_[0].width(); }
  int height() const { return masks_[0].height(); }

  /// Sum of active pixels across all 7 masks.
  std::uint64_t active_count() const;

 private:
  std::array<BinaryMask, kDiagnosisClassCount> masks_;
};

/// Entries sum to 1 after normalization, or are the uniform 1/7 fallback.
using ConfidenceVector = std::array<double, kDiagnosisClassCount>;

/// Training-data construction: copies the boundary mask into the slot for
/// `label` and leaves the other six classes empty.
ClassMaskSet build_class_training_mask(const BinaryMask& boundary,
                                       DiagnosisLabel label);

struct VoteResult {
  DiagnosisLabel label = DiagnosisLabel::kMel;
  ConfidenceVector confidences{};
  std::array<double, kDiagnosisClassCount> areas{};  // normalized, the trace
  bool fallback = false;  // all areas zero -> NV + uniform confidences
};

/// Picks the class whose mask covers the biggest area. Ties break toward
/// the first label in MEL..VASC order. Confidences are the areas
/// normalized to sum 1; with no active pixels anywhere the result is NV
/// with uniform confidences.
VoteResult vote(const ClassMaskSet& set);

/// Source of predicted masks for an image id. Implementations must be
/// safe for concurrent reads.
class MaskPredictor {
 public:
  virtual ~MaskPredictor() = default;
  virtual std::string name() const = 0;
  /// Task-1 style boundary mask at the image's resolution, or nullopt if
  /// this source has no prediction for the id.
  virtual std::optional<BinaryMask> boundary_mask(
      const std::string& image_id, const RasterImage& image) const = 0;
  /// The 7 per-disease masks, or nullopt if this source cannot answer.
  virtual std::optional<ClassMaskSet> class_masks(const std::string& image_id,
                                                  int width,
                                                  int height) const = 0;
};

/// File-layout predictor:
///   <root>/task1/<image_id>_segmentation.png
///   <root>/task3/<image_id>_<LABEL>.png   (7 files; a missing file is an
///                                          empty mask)
/// Masks must match the queried dimensions.
class DirectoryPredictor : public MaskPredictor {
 public:
  explicit DirectoryPredictor(std::string root);
  std::string name() const override;
  std::optional<BinaryMask> boundary_mask(
      const std::string& image_id, const RasterImage& image) const override;
  std::optional<ClassMaskSet> class_masks(const std::string& image_id,
                                          int width, int height) const override;

 private:
  std::string root_;
};

/// Deterministic stand-in for the trained boundary model; answers every
/// boundary query with baseline_segment and no class-mask queries.
class BaselineSegmenterPredictor : public MaskPredictor {
 public:
  std::string name() const override;
  std::optional<BinaryMask> boundary_mask(
      const std::string& image_id, const RasterImage& image) const override;
  std::optional<ClassMaskSet> class_masks(const std::string& image_id,
                                          int width, int height) const override;
};

struct ClassifyResult {
  VoteResult vote;
  std::vector<std::string> errors;  // per-image, recoverable
};

/// The hybrid pipeline for one image: fetch the boundary mask, fetch the
/// 7 class masks, optionally clip each class mask to the boundary, then
/// vote. A missing prediction is recorded as an error and the image falls
/// back to the uniform/NV vote.
ClassifyResult classify(const std::string& image_id, const RasterImage& image,
                        const MaskPredictor& boundary_predictor,
                        const MaskPredictor& class_predictor,
                        bool intersect_boundary);

/// Otsu-threshold baseline segmenter: luminance -> Otsu -> keep the darker
/// side (lesions are darker than the surrounding skin) -> largest
/// 4-connected component -> fill holes. A single-intensity image yields an
/// all-false mask.
BinaryMask baseline_segment(const RasterImage& img);

/// Otsu's between-class-variance threshold over a 256-bin histogram.
/// Returns -1 when the histogram has fewer than two occupied bins.
int otsu_threshold(const std::array<std::uint64_t, 256>& histogram);

/// Keeps only the largest 4-connected component (first in scan order on
/// ties). Empty input stays empty.
BinaryMask largest_component(const BinaryMask& mask);

/// Activates inactive regions not connected to the border.
BinaryMask fill_holes(const BinaryMask& mask);

}  // namespace lesionbench
