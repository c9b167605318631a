#pragma once

#include <string>

#include "lesionbench/mask.hpp"

namespace lesionbench {

/// Decodes a PNG into an 8-bit RasterImage. Palette images are expanded,
/// alpha channels are dropped, sub-8-bit grayscale is widened. 16-bit
/// files are rejected: the toolkit is 8-bit throughout.
RasterImage read_image_png(const std::string& path);

void write_image_png(const RasterImage& img, const std::string& path);

/// Reads a mask PNG (nominally 1-channel, 0/255) and binarizes it with
/// `pixel > threshold`. RGB mask files are converted to luminance first.
BinaryMask read_mask_png(const std::string& path, int threshold = 127);

/// Serializes a mask as 1-channel grayscale PNG with values 0/255.
void write_mask_png(const BinaryMask& mask, const std::string& path);

/// Width/height from the PNG header alone; does not decode pixel data.
/// Cheap enough to validate mask-vs-image dimensions for a whole dataset
/// at discovery time.
std::pair<int, int> png_dimensions(const std::string& path);

}  // namespace lesionbench
