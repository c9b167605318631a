#include "lesionbench/diagnose.hpp"

#include <algorithm>
#include <filesystem>

#include "lesionbench/error.hpp"
#include "lesionbench/png_io.hpp"

namespace fs = std::filesystem;

namespace lesionbench {

ClassMaskSet::ClassMaskSet(std::array<BinaryMask, kDiagnosisClassCount> masks)
    : masks_(std::move(masks)) {
  for (const auto& m : masks_) {
    if (!m.same_shape(masks_[0])) {
      throw DimensionError("class mask set has mixed dimensions");
    }
  }
}

ClassMaskSet ClassMaskSet::all_empty(int width, int height) {
  BinaryMask empty(width, height);
  return ClassMaskSet({empty, empty, empty, empty, empty, empty, empty});
}

void ClassMaskSet::replace(DiagnosisLabel label, BinaryMask mask) {
  if (!mask.same_shape(masks_[0])) {
    throw DimensionError("replacement mask does not match set dimensions");
  }
  masks_[static_cast<int>(label)] = std::move(mask);
}

std::uint64_t ClassMaskSet::active_count() const {
  std::uint64_t total = 0;
  for (const auto& m : masks_) total += m.active_count();
  return total;
}

ClassMaskSet build_class_training_mask(const BinaryMask& boundary,
                                       DiagnosisLabel label) {
  ClassMaskSet set = ClassMaskSet::all_empty(boundary.width(),
                                             boundary.height());
  set.replace(label, boundary);
  return set;
}

VoteResult vote(const ClassMaskSet& set) {
  VoteResult result;
  double sum = 0.0;
  for (auto label : all_labels()) {
    double area = set.mask(label).normalized_area();
    result.areas[static_cast<int>(label)] = area;
    sum += area;
  }
  if (sum == 0.0) {
    // No active pixels anywhere: majority-class fallback.
    result.label = DiagnosisLabel::kNv;
    result.confidences.fill(1.0 / kDiagnosisClassCount);
    result.fallback = true;
    return result;
  }
  int best = 0;
  for (int i = 1; i < kDiagnosisClassCount; ++i) {
    if (result.areas[i] > result.areas[best]) best = i;  // ties keep MEL-first
  }
  result.label = static_cast<DiagnosisLabel>(best);
  for (int i = 0; i < kDiagnosisClassCount; ++i) {
    result.confidences[i] = result.areas[i] / sum;
  }
  return result;
}

DirectoryPredictor::DirectoryPredictor(std::string root)
    : root_(std::move(root)) {}

std::string DirectoryPredictor::name() const { return "directory:" + root_; }

std::optional<BinaryMask> DirectoryPredictor::boundary_mask(
    const std::string& image_id, const RasterImage& image) const {
  fs::path path = fs::path(root_) / "task1" / (image_id + "_segmentation.png");
  if (!fs::exists(path)) return std::nullopt;
  BinaryMask mask = read_mask_png(path.string());
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw DimensionError("boundary prediction " + path.string() + " is " +
                         std::to_string(mask.width()) + "x" +
                         std::to_string(mask.height()) + ", image is " +
                         std::to_string(image.width()) + "x" +
                         std::to_string(image.height()));
  }
  return mask;
}

std::optional<ClassMaskSet> DirectoryPredictor::class_masks(
    const std::string& image_id, int width, int height) const {
  fs::path dir = fs::path(root_) / "task3";
  ClassMaskSet set = ClassMaskSet::all_empty(width, height);
  bool any = false;
  for (auto label : all_labels()) {
    fs::path path =
        dir / (image_id + "_" + std::string(label_name(label)) + ".png");
    if (!fs::exists(path)) continue;  // missing file = empty mask
    BinaryMask mask = read_mask_png(path.string());
    if (mask.width() != width || mask.height() != height) {
      throw DimensionError("class prediction " + path.string() + " is " +
                           std::to_string(mask.width()) + "x" +
                           std::to_string(mask.height()) + ", expected " +
                           std::to_string(width) + "x" +
                           std::to_string(height));
    }
    set.replace(label, std::move(mask));
    any = true;
  }
  if (!any) return std::nullopt;
  return set;
}

std::string BaselineSegmenterPredictor::name() const { return "baseline"; }

std::optional<BinaryMask> BaselineSegmenterPredictor::boundary_mask(
    const std::string&, const RasterImage& image) const {
  return baseline_segment(image);
}

std::optional<ClassMaskSet> BaselineSegmenterPredictor::class_masks(
    const std::string&, int, int) const {
  return std::nullopt;
}

ClassifyResult classify(const std::string& image_id, const RasterImage& image,
                        const MaskPredictor& boundary_predictor,
                        const MaskPredictor& class_predictor,
                        bool intersect_boundary) {
  ClassifyResult result;
  auto fall_back = [&](const std::string& message) {
    result.errors.push_back(message);
    result.vote = VoteResult{};
    result.vote.label = DiagnosisLabel::kNv;
    result.vote.confidences.fill(1.0 / kDiagnosisClassCount);
    result.vote.fallback = true;
  };

  try {
    auto masks = class_predictor.class_masks(image_id, image.width(),
                                             image.height());
    if (!masks.has_value()) {
      fall_back("no class masks for '" + image_id + "' from " +
                class_predictor.name());
      return result;
    }
    if (intersect_boundary) {
      auto boundary = boundary_predictor.boundary_mask(image_id, image);
      if (!boundary.has_value()) {
        fall_back("no boundary mask for '" + image_id + "' from " +
                  boundary_predictor.name());
        return result;
      }
      for (auto label : all_labels()) {
        masks->replace(label, intersect(masks->mask(label), *boundary));
      }
    }
    result.vote = vote(*masks);
  } catch (const Error& e) {
    fall_back(std::string("'") + image_id + "': " + e.what());
  }
  return result;
}

int otsu_threshold(const std::array<std::uint64_t, 256>& histogram) {
  std::uint64_t total = 0;
  double weighted_sum = 0.0;
  for (int i = 0; i < 256; ++i) {
    total += histogram[i];
    weighted_sum += static_cast<double>(i) * histogram[i];
  }
  if (total == 0) return -1;

  double background_sum = 0.0;
  std::uint64_t background_count = 0;
  double best_variance = -1.0;
  int best_threshold = -1;

  for (int t = 0; t < 255; ++t) {
    background_count += histogram[t];
    if (background_count == 0) continue;
    std::uint64_t foreground_count = total - background_count;
    if (foreground_count == 0) break;
    background_sum += static_cast<double>(t) * histogram[t];

    double mean_bg = background_sum / background_count;
    double mean_fg = (weighted_sum - background_sum) / foreground_count;
    double diff = mean_bg - mean_fg;
    double variance = static_cast<double>(background_count) *
                      static_cast<double>(foreground_count) * diff * diff;
    if (variance > best_variance) {
      best_variance = variance;
      best_threshold = t;
    }
  }
  return best_threshold;
}

BinaryMask largest_component(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> component(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::uint64_t> sizes;
  std::vector<std::size_t> stack;

  for (int start = 0; start < w * h; ++start) {
    if (!mask.bits()[start] || component[start] >= 0) continue;
    int id = static_cast<int>(sizes.size());
    sizes.push_back(0);
    stack.push_back(start);
    component[start] = id;
    while (!stack.empty()) {
      std::size_t idx = stack.back();
      stack.pop_back();
      ++sizes[id];
      int x = static_cast<int>(idx % w);
      int y = static_cast<int>(idx / w);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
        std::size_t nidx = static_cast<std::size_t>(ny[k]) * w + nx[k];
        if (!mask.bits()[nidx] || component[nidx] >= 0) continue;
        component[nidx] = id;
        stack.push_back(nidx);
      }
    }
  }
  if (sizes.empty()) return BinaryMask(w, h);

  int best = 0;
  for (int i = 1; i < static_cast<int>(sizes.size()); ++i) {
    if (sizes[i] > sizes[best]) best = i;  // first-found wins ties
  }
  std::vector<std::uint8_t> bits(component.size());
  for (std::size_t i = 0; i < component.size(); ++i) {
    bits[i] = component[i] == best ? 1 : 0;
  }
  return BinaryMask(w, h, std::move(bits));
}

BinaryMask fill_holes(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::size_t> stack;

  auto push = [&](int x, int y) {
    std::size_t idx = static_cast<std::size_t>(y) * w + x;
    if (mask.bits()[idx] || outside[idx]) return;
    outside[idx] = 1;
    stack.push_back(idx);
  };
  for (int x = 0; x < w; ++x) {
    push(x, 0);
    push(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    push(0, y);
    push(w - 1, y);
  }
  while (!stack.empty()) {
    std::size_t idx = stack.back();
    stack.pop_back();
    int x = static_cast<int>(idx % w);
    int y = static_cast<int>(idx / w);
    if (x > 0) push(x - 1, y);
    if (x < w - 1) push(x + 1, y);
    if (y > 0) push(x, y - 1);
    if (y < h - 1) push(x, y + 1);
  }

  // Active, plus every inactive pixel the border flood never reached.
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = (mask.bits()[i] || !outside[i]) ? 1 : 0;
  }
  return BinaryMask(w, h, std::move(bits));
}

BinaryMask baseline_segment(const RasterImage& img) {
  RasterImage gray = to_grayscale(img);
  std::array<std::uint64_t, 256> histogram{};
  for (std::uint8_t s : gray.samples()) ++histogram[s];

  int threshold = otsu_threshold(histogram);
  if (threshold < 0) return BinaryMask(img.width(), img.height());

  // Lesions are darker than the surrounding skin.
  std::vector<std::uint8_t> bits(gray.samples().size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = gray.samples()[i] <= threshold ? 1 : 0;
  }
  BinaryMask dark(img.width(), img.height(), std::move(bits));
  return fill_holes(largest_component(dark));
}

}  // namespace lesionbench
