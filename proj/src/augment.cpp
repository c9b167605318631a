#include "lesionbench/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lesionbench/error.hpp"
#include "lesionbench/rng.hpp"

namespace lesionbench {

void validate(const AugmentationSpec& spec) {
  if (spec.quarter_turns < 0 || spec.quarter_turns > 3) {
    throw ConfigError("quarter_turns must be in {0,1,2,3}, got " +
                      std::to_string(spec.quarter_turns));
  }
  if (spec.luminosity < kLuminosityMin || spec.luminosity > kLuminosityMax) {
    throw ConfigError("luminosity factor " + std::to_string(spec.luminosity) +
                      " outside [0.8, 1.5]");
  }
  if (spec.blur_sigma < 0.0) {
    throw ConfigError("blur sigma must be non-negative");
  }
}

namespace {

inline void flipped_coords(FlipAxis axis, int w, int h, int x, int y, int& fx,
                           int& fy) {
  if (axis == FlipAxis::kHorizontal) {
    fx = w - 1 - x;
    fy = y;
  } else {
    fx = x;
    fy = h - 1 - y;
  }
}

}  // namespace

RasterImage flip(const RasterImage& img, FlipAxis axis) {
  RasterImage out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int fx, fy;
      flipped_coords(axis, img.width(), img.height(), x, y, fx, fy);
      for (int c = 0; c < img.channels(); ++c) {
        out.set(fx, fy, c, img.at(x, y, c));
      }
    }
  }
  return out;
}

BinaryMask flip(const BinaryMask& mask, FlipAxis axis) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      int fx, fy;
      flipped_coords(axis, mask.width(), mask.height(), x, y, fx, fy);
      out.set(fx, fy, true);
    }
  }
  return out;
}

namespace {

void check_turns(int quarter_turns) {
  if (quarter_turns < 0 || quarter_turns > 3) {
    throw ConfigError("quarter_turns must be in {0,1,2,3}, got " +
                      std::to_string(quarter_turns));
  }
}

// One counter-clockwise quarter turn: (x, y) -> (y, W-1-x).
RasterImage rotate_once(const RasterImage& img) {
  RasterImage out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        out.set(y, img.width() - 1 - x, c, img.at(x, y, c));
      }
    }
  }
  return out;
}

BinaryMask rotate_once(const BinaryMask& mask) {
  BinaryMask out(mask.height(), mask.width());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) out.set(y, mask.width() - 1 - x, true);
    }
  }
  return out;
}

}  // namespace

RasterImage rotate90(const RasterImage& img, int quarter_turns) {
  check_turns(quarter_turns);
  RasterImage out = img;
  for (int k = 0; k < quarter_turns; ++k) out = rotate_once(out);
  return out;
}

BinaryMask rotate90(const BinaryMask& mask, int quarter_turns) {
  check_turns(quarter_turns);
  BinaryMask out = mask;
  for (int k = 0; k < quarter_turns; ++k) out = rotate_once(out);
  return out;
}

RasterImage scale_luminosity(const RasterImage& img, double factor) {
  if (factor < kLuminosityMin || factor > kLuminosityMax) {
    throw ConfigError("luminosity factor " + std::to_string(factor) +
                      " outside [0.8, 1.5]");
  }
  std::vector<std::uint8_t> samples(img.samples().size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(img.samples()[i] * factor), 0l, 255l));
  }
  return RasterImage(img.width(), img.height(), img.channels(),
                     std::move(samples));
}

RasterImage gaussian_blur(const RasterImage& img, double sigma) {
  if (sigma <= 0.0) {
    throw ConfigError("blur sigma must be positive, got " +
                      std::to_string(sigma));
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();

  // Horizontal pass into a float buffer, then vertical pass.
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int sx = std::clamp(x + i, 0, w - 1);
          acc += kernel[i + radius] * img.at(sx, y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
      }
    }
  }
  RasterImage out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          int sy = std::clamp(y + i, 0, h - 1);
          acc += kernel[i + radius] *
                 tmp[(static_cast<std::size_t>(sy) * w + x) * ch + c];
        }
        out.set(x, y, c,
                static_cast<std::uint8_t>(
                    std::clamp(std::lround(acc), 0l, 255l)));
      }
    }
  }
  return out;
}

AugmentedSample apply(const AugmentationSpec& spec, const RasterImage& img,
                      std::vector<BinaryMask> masks) {
  validate(spec);
  for (const auto& mask : masks) {
    if (mask.width() != img.width() || mask.height() != img.height()) {
      throw DimensionError(
          "augmentation mask " + std::to_string(mask.width()) + "x" +
          std::to_string(mask.height()) + " does not match image " +
          std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
  }

  RasterImage image = img;
  if (spec.flip_h) {
    image = flip(image, FlipAxis::kHorizontal);
    for (auto& m : masks) m = flip(m, FlipAxis::kHorizontal);
  }
  if (spec.flip_v) {
    image = flip(image, FlipAxis::kVertical);
    for (auto& m : masks) m = flip(m, FlipAxis::kVertical);
  }
  if (spec.quarter_turns != 0) {
    image = rotate90(image, spec.quarter_turns);
    for (auto& m : masks) m = rotate90(m, spec.quarter_turns);
  }
  image = scale_luminosity(image, spec.luminosity);
  if (spec.blur_sigma > 0.0) {
    image = gaussian_blur(image, spec.blur_sigma);
  }
  return {std::move(image), std::move(masks)};
}

AugmentationSpec sample_spec(std::uint64_t seed, std::uint64_t draw_index) {
  // Independent stream per (seed, index); draw order below is fixed.
  SplitMix64 rng(mix64(seed) ^
                 mix64(0x9e3779b97f4a7c15ull * (draw_index + 1)));
  AugmentationSpec spec;
  spec.flip_h = rng.next_bool();
  spec.flip_v = rng.next_bool();
  spec.quarter_turns = static_cast<int>(rng.next() & 3);
  spec.luminosity =
      kLuminosityMin + (kLuminosityMax - kLuminosityMin) * rng.next_unit();
  spec.blur_sigma = rng.next_bool() ? kBlurSigma : 0.0;
  return spec;
}

}  // namespace lesionbench
