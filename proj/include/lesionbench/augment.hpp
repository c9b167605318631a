#pragma once

#include <cstdint>
#include <vector>

#include "lesionbench/mask.hpp"

namespace lesionbench {

enum class FlipAxis { kHorizontal, kVertical };

inline constexpr double kLuminosityMin = 0.8;
inline constexpr double kLuminosityMax = 1.5;
inline constexpr double kBlurSigma = 2.5;

/// One sampled training-time augmentation: optional flips, a quarter-turn
/// rotation, luminosity scaling and an optional fixed-sigma blur.
/// Geometric parts apply to image and masks alike; photometric parts only
/// ever touch the image.
struct AugmentationSpec {
  bool flip_h = false;
  bool flip_v = false;
  int quarter_turns = 0;     // counter-clockwise, in {0,1,2,3}
  double luminosity = 1.0;   // in [0.8, 1.5]
  double blur_sigma = 0.0;   // 0 disables, otherwise 2.5

  friend bool operator==(const AugmentationSpec&,
                         const AugmentationSpec&) = default;
};

/// Throws ConfigError if any field is outside its allowed range.
void validate(const AugmentationSpec& spec);

RasterImage flip(const RasterImage& img, FlipAxis axis);
BinaryMask flip(const BinaryMask& mask, FlipAxis axis);

/// Counter-clockwise rotation by quarter_turns * 90 degrees. A WxH input
/// becomes HxW for odd turn counts; pixel (x, y) maps to (y, W-1-x) for a
/// single turn.
RasterImage rotate90(const RasterImage& img, int quarter_turns);
BinaryMask rotate90(const BinaryMask& mask, int quarter_turns);

/// clamp(round(sample * factor), 0, 255) per sample. factor must lie in
/// [0.8, 1.5].
RasterImage scale_luminosity(const RasterImage& img, double factor);

/// Separable Gaussian convolution, kernel radius ceil(3*sigma), kernel
/// normalized to sum 1, clamp-to-edge borders. sigma must be positive.
RasterImage gaussian_blur(const RasterImage& img, double sigma);

struct AugmentedSample {
  RasterImage image;
  std::vector<BinaryMask> masks;
};

/// Applies a spec in the fixed order flips -> rotation -> luminosity ->
/// blur. Masks follow only the geometric steps. Every mask must match the
/// image dimensions.
AugmentedSample apply(const AugmentationSpec& spec, const RasterImage& img,
                      std::vector<BinaryMask> masks);

/// Deterministic spec for (seed, draw_index): flips with probability 1/2
/// each, quarter turns uniform on {0..3}, luminosity uniform on
/// [0.8, 1.5], blur at sigma 2.5 with probability 1/2.
AugmentationSpec sample_spec(std::uint64_t seed, std::uint64_t draw_index);

}  // namespace lesionbench
