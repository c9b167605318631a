#pragma once

#include <cstdint>
#include <vector>

namespace lesionbench {

/// 2-D grid of active/inactive pixels, row-major. The common currency of
/// every task: ground-truth lesion boundaries, attribute locations and
/// per-disease class masks are all BinaryMask values.
class BinaryMask {
 public:
  // All-inactive mask. Throws DimensionError unless width, height > 0.
  BinaryMask(int width, int height);
  // Takes ownership of a 0/1 byte grid of exactly width * height entries.
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }

  bool at(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool active) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = active ? 1 : 0;
  }

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  // Number of active pixels.
  std::uint64_t active_count() const;
  // active_count / (width * height), in [0, 1].
  double normalized_area() const;
  bool empty() const { return active_count() == 0; }

  bool same_shape(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// |A ∩ B| / |A ∪ B| over the active-pixel sets. Both masks empty -> 1.0
/// (the 0/0 convention), so jaccard(a, a) == 1 holds for every mask.
/// Throws DimensionError when shapes differ.
double jaccard(const BinaryMask& a, const BinaryMask& b);

/// Pixel-wise AND of two same-shape masks.
BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);

/// 8-bit raster, row-major, interleaved. channels is 1 (grayscale) or
/// 3 (RGB); anything else is rejected at construction.
class RasterImage {
 public:
  RasterImage(int width, int height, int channels);  // zero-filled
  RasterImage(int width, int height, int channels,
              std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  std::uint8_t at(int x, int y, int c) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  void set(int x, int y, int c, std::uint8_t value) {
    samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c] = value;
  }

  const std::vector<std::uint8_t>& samples() const { return samples_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> samples_;
};

/// Resize/pad transform metadata. Carries everything needed to map a
/// prediction made at network resolution back onto the original frame.
struct GeometryRecord {
  int original_width = 0;
  int original_height = 0;
  double scale = 1.0;  // target_side / max(original_width, original_height)
  int pad_left = 0;
  int pad_top = 0;
  int pad_right = 0;
  int pad_bottom = 0;
  int target_side = 0;

  friend bool operator==(const GeometryRecord&, const GeometryRecord&) = default;
};

struct ResizedImage {
  RasterImage image;
  GeometryRecord geometry;
};
struct ResizedMask {
  BinaryMask mask;
  GeometryRecord geometry;
};

/// Scales so the longest side equals target, preserving aspect ratio to
/// within one pixel. Images interpolate bilinearly; the mask overload uses
/// nearest-neighbor so outputs stay binary.
ResizedImage resize_longest_side(const RasterImage& img, int target);
ResizedMask resize_longest_side(const BinaryMask& mask, int target);

/// Pads to side x side with the content centered and zero fill; an odd
/// remainder puts the extra pixel on the bottom/right. Both input
/// dimensions must already be <= side. Pad offsets are recorded.
ResizedImage pad_to_square(const RasterImage& img, int side,
                           GeometryRecord record);
ResizedMask pad_to_square(const BinaryMask& mask, int side,
                          GeometryRecord record);

/// Inverse of resize + pad: crops the padding and rescales back to the
/// original dimensions with nearest-neighbor. The mask must be
/// target_side x target_side as described by the record.
BinaryMask restore_geometry(const BinaryMask& mask,
                            const GeometryRecord& record);

/// Pixel active iff sample > threshold. Grayscale input only.
/// 127 splits the nominal 0/255 mask values while tolerating lossy noise.
BinaryMask mask_from_grayscale(const RasterImage& img, int threshold = 127);

/// 0/255 grayscale rendering of a mask, the PNG serialization form.
RasterImage mask_to_grayscale(const BinaryMask& mask);

/// Rec.601 luminance; identity for 1-channel input.
RasterImage to_grayscale(const RasterImage& img);

}  // namespace lesionbench
