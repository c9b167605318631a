#include "lesionbench/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "lesionbench/error.hpp"

namespace lesionbench {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Thread-local so the message survives the longjmp back out of libpng.
thread_local std::string g_png_error;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  g_png_error = msg ? msg : "png error";
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

RasterImage read_image_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_handler,
                                           png_warning_handler);
  if (!png) throw IoError("libpng init failed for " + path);
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed for " + path);
  }

  std::vector<std::uint8_t> data;
  std::vector<png_bytep> rows;
  int width = 0, height = 0, channels = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode " + path + ": " + g_png_error);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (bit_depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("rejecting 16-bit PNG " + path + "; 8-bit input required");
  }

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported channel layout in " + path);
  }

  std::size_t stride = static_cast<std::size_t>(width) * channels;
  data.resize(stride * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) rows[y] = data.data() + stride * y;

  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  return RasterImage(width, height, channels, std::move(data));
}

void write_image_png(const RasterImage& img, const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_handler,
                                            png_warning_handler);
  if (!png) throw IoError("libpng init failed for " + path);
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed for " + path);
  }

  std::vector<png_bytep> rows(img.height());

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode " + path + ": " + g_png_error);
  }

  png_init_io(png, file.get());
  int color_type =
      img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  const std::uint8_t* base = img.samples().data();
  for (int y = 0; y < img.height(); ++y) {
    rows[y] = const_cast<png_bytep>(base + stride * y);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);

  if (std::fflush(file.get()) != 0) {
    throw IoError("failed to flush " + path);
  }
}

BinaryMask read_mask_png(const std::string& path, int threshold) {
  RasterImage img = read_image_png(path);
  if (img.channels() != 1) img = to_grayscale(img);
  return mask_from_grayscale(img, threshold);
}

void write_mask_png(const BinaryMask& mask, const std::string& path) {
  write_image_png(mask_to_grayscale(mask), path);
}

std::pair<int, int> png_dimensions(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);

  // 8-byte signature + IHDR chunk header + 8 bytes of dimensions.
  unsigned char buf[24];
  if (std::fread(buf, 1, sizeof(buf), file.get()) != sizeof(buf)) {
    throw IoError("truncated PNG " + path);
  }
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n',
                                       0x1a, '\n'};
  if (std::memcmp(buf, sig, 8) != 0 || std::memcmp(buf + 12, "IHDR", 4) != 0) {
    throw IoError(path + " is not a PNG file");
  }
  auto be32 = [&](int off) {
    return (static_cast<int>(buf[off]) << 24) |
           (static_cast<int>(buf[off + 1]) << 16) |
           (static_cast<int>(buf[off + 2]) << 8) | static_cast<int>(buf[off + 3]);
  };
  return {be32(16), be32(20)};
}

}  // namespace lesionbench
