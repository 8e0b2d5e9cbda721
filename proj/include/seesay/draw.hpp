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

// Annotation helpers for the candidate overlays: circle outlines and small
// bitmap digits for candidate indices.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "seesay/grid.hpp"
#include "seesay/image.hpp"

namespace seesay {

inline void put_pixel(RgbImage& image, int x, int y, Rgb color) {
  if (x >= 0 && y >= 0 && x < image.width() && y < image.height()) image(x, y) = color;
}

// Ring of pixels with r - thickness < distance <= r.
inline void draw_circle(RgbImage& image, PixelPoint center, double radius, Rgb color,
                        double thickness = 2.0) {
  const int x0 = static_cast<int>(std::floor(center.x - radius)) - 1;
  const int x1 = static_cast<int>(std::ceil(center.x + radius)) + 1;
  const int y0 = static_cast<int>(std::floor(center.y - radius)) - 1;
  const int y1 = static_cast<int>(std::ceil(center.y + radius)) + 1;
  const double inner = std::max(0.0, radius - thickness);
  for (int y = std::max(0, y0); y <= std::min(image.height() - 1, y1); ++y) {
    for (int x = std::max(0, x0); x <= std::min(image.width() - 1, x1); ++x) {
      const double d2 = (x - center.x) * (x - center.x) + (y - center.y) * (y - center.y);
      if (d2 <= radius * radius && d2 > inner * inner) image(x, y) = color;
    }
  }
}

namespace detail {
// 3x5 glyphs for 0-9, one row per 3-bit group, MSB = left column.
inline constexpr std::array<std::array<std::uint8_t, 5>, 10> kDigits = {{
    {7, 5, 5, 5, 7}, {2, 6, 2, 2, 7}, {7, 1, 7, 4, 7}, {7, 1, 7, 1, 7}, {5, 5, 7, 1, 1},
    {7, 4, 7, 1, 7}, {7, 4, 7, 5, 7}, {7, 1, 1, 1, 1}, {7, 5, 7, 5, 7}, {7, 5, 7, 1, 7},
}};
}  // namespace detail

// Decimal number with its top-left corner at (x, y); each glyph cell is
// `scale` pixels.
inline void draw_number(RgbImage& image, int x, int y, int value, Rgb color, int scale = 2) {
  const std::string text = std::to_string(value);
  int cursor = x;
  for (char c : text) {
    if (c < '0' || c > '9') continue;
    const auto& glyph = detail::kDigits[c - '0'];
    for (int row = 0; row < 5; ++row) {
      for (int col = 0; col < 3; ++col) {
        if (!(glyph[row] & (4 >> col))) continue;
        for (int sy = 0; sy < scale; ++sy) {
          for (int sx = 0; sx < scale; ++sx) {
            put_pixel(image, cursor + col * scale + sx, y + row * scale + sy, color);
          }
        }
      }
    }
    cursor += 4 * scale;
  }
}

// Number roughly centred on `center`.
inline void draw_label(RgbImage& image, PixelPoint center, int value, Rgb color, int scale = 2) {
  const int digits = static_cast<int>(std::to_string(value).size());
  const int width = digits * 4 * scale - scale;
  draw_number(image, static_cast<int>(std::lround(center.x)) - width / 2,
              static_cast<int>(std::lround(center.y)) - 5 * scale / 2, value, color, scale);
}

}  // namespace seesay
