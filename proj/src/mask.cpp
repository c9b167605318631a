#include "lesionbench/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lesionbench/error.hpp"

namespace lesionbench {

namespace {

std::string shape_str(int w, int h) {
  return std::to_string(w) + "x" + std::to_string(h);
}

void require_positive(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("mask/image dimensions must be positive, got " +
                         shape_str(width, height));
  }
}

}  // namespace

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height) {
  require_positive(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  require_positive(width, height);
  if (bits_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("bit grid of " + std::to_string(bits_.size()) +
                         " entries does not cover " + shape_str(width, height));
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::uint64_t BinaryMask::active_count() const {
  return std::accumulate(bits_.begin(), bits_.end(), std::uint64_t{0});
}

double BinaryMask::normalized_area() const {
  return static_cast<double>(active_count()) /
         (static_cast<double>(width_) * height_);
}

double jaccard(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("jaccard over mismatched shapes " +
                         shape_str(a.width(), a.height()) + " vs " +
                         shape_str(b.width(), b.height()));
  }
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  const auto& ba = a.bits();
  const auto& bb = b.bits();
  for (std::size_t i = 0; i < ba.size(); ++i) {
    inter += ba[i] & bb[i];
    uni += ba[i] | bb[i];
  }
  if (uni == 0) return 1.0;  // both masks empty
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("intersect over mismatched shapes " +
                         shape_str(a.width(), a.height()) + " vs " +
                         shape_str(b.width(), b.height()));
  }
  std::vector<std::uint8_t> bits(a.bits().size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = a.bits()[i] & b.bits()[i];
  }
  return BinaryMask(a.width(), a.height(), std::move(bits));
}

RasterImage::RasterImage(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  require_positive(width, height);
  if (channels != 1 && channels != 3) {
    throw DimensionError("unsupported channel count " +
                         std::to_string(channels));
  }
  samples_.assign(static_cast<std::size_t>(width) * height * channels, 0);
}

RasterImage::RasterImage(int width, int height, int channels,
                         std::vector<std::uint8_t> samples)
    : width_(width),
      height_(height),
      channels_(channels),
      samples_(std::move(samples)) {
  require_positive(width, height);
  if (channels != 1 && channels != 3) {
    throw DimensionError("unsupported channel count " +
                         std::to_string(channels));
  }
  if (samples_.size() !=
      static_cast<std::size_t>(width) * height * channels) {
    throw DimensionError("sample buffer of " + std::to_string(samples_.size()) +
                         " bytes does not cover " + shape_str(width, height) +
                         "x" + std::to_string(channels));
  }
}

namespace {

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

// Output dimensions after scaling the longest side to target.
void scaled_dims(int w, int h, int target, int& nw, int& nh, double& scale) {
  scale = static_cast<double>(target) / std::max(w, h);
  if (w >= h) {
    nw = target;
    nh = std::max(1, static_cast<int>(std::lround(h * scale)));
  } else {
    nh = target;
    nw = std::max(1, static_cast<int>(std::lround(w * scale)));
  }
}

// Nearest source index for destination pixel d when resampling n_src
// pixels onto n_dst, using center-aligned sampling.
int nearest_index(int d, int n_src, int n_dst) {
  int s = static_cast<int>((d + 0.5) * n_src / n_dst);
  return std::clamp(s, 0, n_src - 1);
}

BinaryMask resize_mask_nearest(const BinaryMask& mask, int nw, int nh) {
  BinaryMask out(nw, nh);
  for (int y = 0; y < nh; ++y) {
    int sy = nearest_index(y, mask.height(), nh);
    for (int x = 0; x < nw; ++x) {
      int sx = nearest_index(x, mask.width(), nw);
      out.set(x, y, mask.at(sx, sy));
    }
  }
  return out;
}

}  // namespace

ResizedImage resize_longest_side(const RasterImage& img, int target) {
  if (target <= 0) {
    throw DimensionError("resize target must be positive, got " +
                         std::to_string(target));
  }
  int nw = 0, nh = 0;
  double scale = 1.0;
  scaled_dims(img.width(), img.height(), target, nw, nh, scale);

  RasterImage out(nw, nh, img.channels());
  const int w = img.width();
  const int h = img.height();
  for (int y = 0; y < nh; ++y) {
    double sy = (y + 0.5) * h / nh - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    double fy = sy - y0;
    int y1 = std::clamp(y0 + 1, 0, h - 1);
    y0 = std::clamp(y0, 0, h - 1);
    for (int x = 0; x < nw; ++x) {
      double sx = (x + 0.5) * w / nw - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      double fx = sx - x0;
      int x1 = std::clamp(x0 + 1, 0, w - 1);
      x0 = std::clamp(x0, 0, w - 1);
      for (int c = 0; c < img.channels(); ++c) {
        double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
        double bot = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
        out.set(x, y, c, clamp_u8(top * (1.0 - fy) + bot * fy));
      }
    }
  }

  GeometryRecord record;
  record.original_width = w;
  record.original_height = h;
  record.scale = scale;
  record.target_side = target;
  return {std::move(out), record};
}

ResizedMask resize_longest_side(const BinaryMask& mask, int target) {
  if (target <= 0) {
    throw DimensionError("resize target must be positive, got " +
                         std::to_string(target));
  }
  int nw = 0, nh = 0;
  double scale = 1.0;
  scaled_dims(mask.width(), mask.height(), target, nw, nh, scale);

  GeometryRecord record;
  record.original_width = mask.width();
  record.original_height = mask.height();
  record.scale = scale;
  record.target_side = target;
  return {resize_mask_nearest(mask, nw, nh), record};
}

namespace {

struct Pads {
  int left, top, right, bottom;
};

// Centered placement; the extra pixel of an odd remainder goes bottom/right.
Pads centered_pads(int w, int h, int side) {
  if (w > side || h > side) {
    throw DimensionError("cannot pad " + shape_str(w, h) + " into " +
                         std::to_string(side) + "x" + std::to_string(side));
  }
  Pads p{};
  p.left = (side - w) / 2;
  p.right = side - w - p.left;
  p.top = (side - h) / 2;
  p.bottom = side - h - p.top;
  return p;
}

GeometryRecord with_pads(GeometryRecord record, const Pads& p, int side) {
  record.pad_left = p.left;
  record.pad_top = p.top;
  record.pad_right = p.right;
  record.pad_bottom = p.bottom;
  record.target_side = side;
  return record;
}

}  // namespace

ResizedImage pad_to_square(const RasterImage& img, int side,
                           GeometryRecord record) {
  Pads p = centered_pads(img.width(), img.height(), side);
  RasterImage out(side, side, img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        out.set(x + p.left, y + p.top, c, img.at(x, y, c));
      }
    }
  }
  return {std::move(out), with_pads(record, p, side)};
}

ResizedMask pad_to_square(const BinaryMask& mask, int side,
                          GeometryRecord record) {
  Pads p = centered_pads(mask.width(), mask.height(), side);
  BinaryMask out(side, side);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) out.set(x + p.left, y + p.top, true);
    }
  }
  return {std::move(out), with_pads(record, p, side)};
}

BinaryMask restore_geometry(const BinaryMask& mask,
                            const GeometryRecord& record) {
  if (mask.width() != record.target_side ||
      mask.height() != record.target_side) {
    throw DimensionError(
        "restore_geometry expects a " + std::to_string(record.target_side) +
        "x" + std::to_string(record.target_side) + " mask, got " +
        shape_str(mask.width(), mask.height()));
  }
  int content_w = record.target_side - record.pad_left - record.pad_right;
  int content_h = record.target_side - record.pad_top - record.pad_bottom;
  if (content_w <= 0 || content_h <= 0 || record.original_width <= 0 ||
      record.original_height <= 0) {
    throw DimensionError("geometry record describes an empty content region");
  }

  BinaryMask content(content_w, content_h);
  for (int y = 0; y < content_h; ++y) {
    for (int x = 0; x < content_w; ++x) {
      if (mask.at(x + record.pad_left, y + record.pad_top)) {
        content.set(x, y, true);
      }
    }
  }
  if (content_w == record.original_width &&
      content_h == record.original_height) {
    return content;
  }
  return resize_mask_nearest(content, record.original_width,
                             record.original_height);
}

BinaryMask mask_from_grayscale(const RasterImage& img, int threshold) {
  if (img.channels() != 1) {
    throw DimensionError("mask_from_grayscale requires 1 channel, got " +
                         std::to_string(img.channels()));
  }
  std::vector<std::uint8_t> bits(img.samples().size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = img.samples()[i] > threshold ? 1 : 0;
  }
  return BinaryMask(img.width(), img.height(), std::move(bits));
}

RasterImage mask_to_grayscale(const BinaryMask& mask) {
  std::vector<std::uint8_t> samples(mask.bits().size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = mask.bits()[i] ? 255 : 0;
  }
  return RasterImage(mask.width(), mask.height(), 1, std::move(samples));
}

RasterImage to_grayscale(const RasterImage& img) {
  if (img.channels() == 1) return img;
  RasterImage out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double lum = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                   0.114 * img.at(x, y, 2);
      out.set(x, y, 0, clamp_u8(lum));
    }
  }
  return out;
}

}  // namespace lesionbench
