/*
 * Copyright 2026 The SeeSay Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// RGB image type, PNG/PFM encoding and the digest/base64 helpers used for
// fixture keys and HTTP payloads.

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "seesay/grid.hpp"

namespace seesay {

using Bytes = std::vector<std::uint8_t>;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit RGB, row-major, interleaved.
class RgbImage {
 public:
  RgbImage(int width, int height, Rgb fill = {}) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ParameterError("image: dimensions must be >= 1");
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
  }
  int width() const { return width_; }
  int height() const { return height_; }
  Rgb& operator()(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  const Rgb& operator()(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const Rgb> pixels() const { return pixels_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

template <typename T>
void require_same_shape(const RgbImage& image, const Grid<T>& grid, const char* what) {
  if (image.width() != grid.width() || image.height() != grid.height()) {
    throw StructuralError(std::string(what) + ": image and map dimensions differ");
  }
}

// Decoded PNG of any supported layout, widened to 16 bit per channel.
struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 gray, 3 rgb (alpha stripped, palettes expanded)
  int bit_depth = 0; // 8 or 16 as stored in the file
  std::vector<std::uint16_t> samples;
};

namespace detail {

inline void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

inline void png_read_from_span(png_structp png, png_bytep data, png_size_t length) {
  auto* cursor = static_cast<std::pair<const std::uint8_t*, std::size_t>*>(png_get_io_ptr(png));
  if (length > cursor->second) png_error(png, "truncated PNG stream");
  std::memcpy(data, cursor->first, length);
  cursor->first += length;
  cursor->second -= length;
}

[[noreturn]] inline void png_fail(png_structp, png_const_charp message) {
  throw IoError(std::string("png: ") + message);
}

inline void png_warn(png_structp, png_const_charp) {}

// Fixed compression settings and no tIME chunk, so output bytes depend only on
// the pixels.
inline Bytes encode_png_rows(int width, int height, int color_type, int bit_depth,
                             const std::vector<png_bytep>& rows) {
  Bytes out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  if (!png) throw IoError("png: cannot allocate write struct");
  png_infop info = png_create_info_struct(png);
  try {
    png_set_write_fn(png, &out, png_write_to_vector, nullptr);
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace detail

inline Bytes encode_png(const RgbImage& image) {
  std::vector<png_bytep> rows(image.height());
  static_assert(sizeof(Rgb) == 3);
  for (int y = 0; y < image.height(); ++y) {
    rows[y] = reinterpret_cast<png_bytep>(const_cast<Rgb*>(&image(0, y)));
  }
  return detail::encode_png_rows(image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

// 8-bit grayscale PNG from raw samples.
inline Bytes encode_gray_png(int width, int height, const std::vector<std::uint8_t>& gray) {
  if (gray.size() != static_cast<std::size_t>(width) * height) {
    throw StructuralError("encode_gray_png: sample count mismatch");
  }
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(gray.data() + static_cast<std::size_t>(y) * width);
  }
  return detail::encode_png_rows(width, height, PNG_COLOR_TYPE_GRAY, 8, rows);
}

// 16-bit grayscale PNG; samples are native-endian.
inline Bytes encode_gray16_png(int width, int height, const std::vector<std::uint16_t>& gray) {
  if (gray.size() != static_cast<std::size_t>(width) * height) {
    throw StructuralError("encode_gray16_png: sample count mismatch");
  }
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = reinterpret_cast<png_bytep>(
        const_cast<std::uint16_t*>(gray.data() + static_cast<std::size_t>(y) * width));
  }
  return detail::encode_png_rows(width, height, PNG_COLOR_TYPE_GRAY, 16, rows);
}

// Mask as grayscale PNG: bit 1 -> 255, bit 0 -> 0.
inline Bytes encode_mask_png(const BinaryMask& mask) {
  std::vector<std::uint8_t> gray(mask.size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.values()[i] ? 255 : 0;
  return encode_gray_png(mask.width(), mask.height(), gray);
}

// Grid with values in [0,1] as 8-bit grayscale (used for depth attachments).
inline Bytes encode_unit_grid_png(const ScalarGrid& grid) {
  std::vector<std::uint8_t> gray(grid.size());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const double v = std::clamp(grid.values()[i], 0.0, 1.0);
    gray[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return encode_gray_png(grid.width(), grid.height(), gray);
}

inline DecodedPng decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw IoError("png: not a PNG stream");
  }
  DecodedPng result;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_fail,
                                           detail::png_warn);
  if (!png) throw IoError("png: cannot allocate read struct");
  png_infop info = png_create_info_struct(png);
  std::pair<const std::uint8_t*, std::size_t> cursor{bytes.data(), bytes.size()};
  try {
    png_set_read_fn(png, &cursor, detail::png_read_from_span);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    result.bit_depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) {
      png_set_palette_to_rgb(png);
      result.bit_depth = 8;
    }
    if (color == PNG_COLOR_TYPE_GRAY && result.bit_depth < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
      result.bit_depth = 8;
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (result.bit_depth == 16) png_set_swap(png);
    png_read_update_info(png, info);
    result.width = static_cast<int>(png_get_image_width(png, info));
    result.height = static_cast<int>(png_get_image_height(png, info));
    result.channels = png_get_channels(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<std::uint8_t> raw(row_bytes * result.height);
    std::vector<png_bytep> rows(result.height);
    for (int y = 0; y < result.height; ++y) rows[y] = raw.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    const std::size_t count = static_cast<std::size_t>(result.width) * result.height * result.channels;
    result.samples.resize(count);
    if (result.bit_depth == 16) {
      for (int y = 0; y < result.height; ++y) {
        std::memcpy(result.samples.data() + static_cast<std::size_t>(y) * result.width * result.channels,
                    rows[y], static_cast<std::size_t>(result.width) * result.channels * 2);
      }
    } else {
      for (int y = 0; y < result.height; ++y) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(result.width) * result.channels; ++i) {
          result.samples[static_cast<std::size_t>(y) * result.width * result.channels + i] = rows[y][i];
        }
      }
    }
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return result;
}

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline RgbImage load_rgb_png(const std::filesystem::path& path) {
  const DecodedPng png = decode_png(read_file(path));
  RgbImage image(png.width, png.height);
  const int shift = png.bit_depth == 16 ? 8 : 0;
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * png.width + x) * png.channels;
      auto sample = [&](int c) { return static_cast<std::uint8_t>(png.samples[base + c] >> shift); };
      image(x, y) = png.channels >= 3 ? Rgb{sample(0), sample(1), sample(2)}
                                      : Rgb{sample(0), sample(0), sample(0)};
    }
  }
  return image;
}

// Grayscale mask PNG; any sample >= 128 (8-bit scale) counts as 1.
inline BinaryMask load_mask_png(const std::filesystem::path& path) {
  const DecodedPng png = decode_png(read_file(path));
  BinaryMask mask(png.width, png.height);
  const unsigned threshold = png.bit_depth == 16 ? 32768u : 128u;
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * png.width + x) * png.channels;
      mask(x, y) = png.samples[base] >= threshold ? 1 : 0;
    }
  }
  return mask;
}

// Portable float map (grayscale "Pf"). Rows are stored bottom-to-top.
inline ScalarGrid decode_pfm(std::span<const std::uint8_t> bytes) {
  std::string header(reinterpret_cast<const char*>(bytes.data()),
                     std::min<std::size_t>(bytes.size(), 256));
  std::istringstream in(header);
  std::string magic;
  int width = 0;
  int height = 0;
  double scale = 0.0;
  in >> magic >> width >> height >> scale;
  if (!in || magic != "Pf") throw IoError("pfm: only grayscale 'Pf' maps are supported");
  const std::size_t offset = static_cast<std::size_t>(in.tellg()) + 1;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (width < 1 || height < 1 || bytes.size() < offset + count * 4) {
    throw IoError("pfm: truncated data");
  }
  const bool little = scale < 0.0;
  std::vector<double> values(count);
  for (int row = 0; row < height; ++row) {
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* p = bytes.data() + offset + (static_cast<std::size_t>(row) * width + x) * 4;
      std::uint32_t bits = little ? (p[0] | p[1] << 8 | p[2] << 16 | static_cast<std::uint32_t>(p[3]) << 24)
                                  : (p[3] | p[2] << 8 | p[1] << 16 | static_cast<std::uint32_t>(p[0]) << 24);
      float f;
      std::memcpy(&f, &bits, 4);
      values[static_cast<std::size_t>(height - 1 - row) * width + x] = f;
    }
  }
  return ScalarGrid(width, height, std::move(values));
}

inline Bytes encode_pfm(const ScalarGrid& grid) {
  std::string header = "Pf\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n-1.0\n";
  Bytes out(header.begin(), header.end());
  for (int row = grid.height() - 1; row >= 0; --row) {
    for (int x = 0; x < grid.width(); ++x) {
      const float f = static_cast<float>(grid(x, row));
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
    }
  }
  return out;
}

// Depth from a .pfm float map or an 8/16-bit grayscale PNG (raw sample values).
inline ScalarGrid load_depth(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  if (path.extension() == ".pfm") return decode_pfm(bytes);
  const DecodedPng png = decode_png(bytes);
  std::vector<double> values(static_cast<std::size_t>(png.width) * png.height);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = png.samples[i * png.channels];
  return ScalarGrid(png.width, png.height, std::move(values));
}

inline std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

inline std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace seesay
