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

// Pixel-grid primitives shared by the geometry branch and the zone scorer.
// Every function here is pure and may be called concurrently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "seesay/grid.hpp"

namespace seesay {

// Square structuring element of odd side length.
class StructuringElement {
 public:
  explicit StructuringElement(int size) : size_(size) {
    if (size < 1 || size % 2 == 0) {
      throw ParameterError("structuring element size must be odd and >= 1, got " +
                           std::to_string(size));
    }
  }
  int size() const { return size_; }
  int radius() const { return size_ / 2; }

 private:
  int size_;
};

namespace detail {

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Normalized 1-D Gaussian taps for offsets -radius..radius.
inline std::vector<double> gaussian_taps(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    taps[i + radius] = v;
    sum += v;
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Min (erode) or max (dilate) over the square window clipped to the image.
// Clipping is equivalent to replicate padding for square windows.
inline BinaryMask window_extremum(const BinaryMask& mask, int radius, bool take_max) {
  const int w = mask.width();
  const int h = mask.height();
  BinaryMask rows(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t acc = take_max ? 0 : 1;
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(w - 1, x + radius);
      for (int u = x0; u <= x1; ++u) {
        acc = take_max ? std::max(acc, mask(u, y)) : std::min(acc, mask(u, y));
      }
      rows(x, y) = acc;
    }
  }
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius);
    const int y1 = std::min(h - 1, y + radius);
    for (int x = 0; x < w; ++x) {
      std::uint8_t acc = take_max ? 0 : 1;
      for (int v = y0; v <= y1; ++v) {
        acc = take_max ? std::max(acc, rows(x, v)) : std::min(acc, rows(x, v));
      }
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace detail

// Separable Gaussian blur, kernel radius ceil(3 sigma), replicate border.
inline ScalarGrid gaussian_smooth(const ScalarGrid& grid, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("gaussian_smooth: sigma must be > 0");
  }
  const auto taps = detail::gaussian_taps(sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = grid.width();
  const int h = grid.height();

  ScalarGrid horizontal(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += taps[k + radius] * grid(detail::clamp_index(x + k, w), y);
      }
      horizontal(x, y) = acc;
    }
  }
  ScalarGrid out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += taps[k + radius] * horizontal(x, detail::clamp_index(y + k, h));
      }
      out(x, y) = acc;
    }
  }
  return out;
}

// Euclidean norm of the spatial gradient. Central differences inside,
// one-sided differences on the first and last row/column.
inline ScalarGrid gradient_magnitude(const ScalarGrid& grid) {
  const int w = grid.width();
  const int h = grid.height();
  if (w < 2 || h < 2) {
    throw ParameterError("gradient_magnitude: both axes need at least 2 pixels");
  }
  ScalarGrid out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double dx;
      if (x == 0) {
        dx = grid(1, y) - grid(0, y);
      } else if (x == w - 1) {
        dx = grid(w - 1, y) - grid(w - 2, y);
      } else {
        dx = 0.5 * (grid(x + 1, y) - grid(x - 1, y));
      }
      double dy;
      if (y == 0) {
        dy = grid(x, 1) - grid(x, 0);
      } else if (y == h - 1) {
        dy = grid(x, h - 1) - grid(x, h - 2);
      } else {
        dy = 0.5 * (grid(x, y + 1) - grid(x, y - 1));
      }
      out(x, y) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return out;
}

inline BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
  return detail::window_extremum(mask, se.radius(), /*take_max=*/false);
}

inline BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
  return detail::window_extremum(mask, se.radius(), /*take_max=*/true);
}

inline BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se) {
  return dilate(erode(mask, se), se);
}

inline BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se) {
  return erode(dilate(mask, se), se);
}

// close(open(mask)). Idempotent: erosion/dilation over clipped symmetric
// windows form an adjunction, so this is an alternating sequential filter.
inline BinaryMask morph_open_close(const BinaryMask& mask, const StructuringElement& se) {
  return morph_close(morph_open(mask, se), se);
}

// Calls visit(component_pixels) for every 8-connected component of 1-bits, in
// raster order of each component's first pixel.
template <typename Visit>
void for_each_component(const BinaryMask& mask, Visit&& visit) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  std::vector<int> component;
  for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
    if (!mask.values()[start] || seen[start]) continue;
    component.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      component.push_back(p);
      const int px = p % w;
      const int py = p / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = px + dx;
          const int ny = py + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const int q = ny * w + nx;
          if (mask.values()[q] && !seen[q]) {
            seen[q] = 1;
            stack.push_back(q);
          }
        }
      }
    }
    visit(static_cast<const std::vector<int>&>(component));
  }
}

// Clears every 8-connected component whose pixel count is below min_area.
inline BinaryMask remove_small_components(const BinaryMask& mask, long min_area) {
  if (min_area < 0) throw ParameterError("remove_small_components: min_area < 0");
  BinaryMask out = mask;
  if (min_area == 0) return out;
  for_each_component(mask, [&](const std::vector<int>& pixels) {
    if (static_cast<long>(pixels.size()) < min_area) {
      for (int p : pixels) out.values()[p] = 0;
    }
  });
  return out;
}

inline bool in_disk(int px, int py, PixelPoint center, double radius) {
  const double dx = px - center.x;
  const double dy = py - center.y;
  return dx * dx + dy * dy <= radius * radius;
}

// Visits every in-image pixel (x, y) with (x-cx)^2 + (y-cy)^2 <= r^2.
template <typename Visit>
void for_each_disk_pixel(PixelPoint center, double radius, int width, int height,
                         Visit&& visit) {
  const int y0 = std::max(0, static_cast<int>(std::floor(center.y - radius)) - 1);
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(center.y + radius)) + 1);
  for (int y = y0; y <= y1; ++y) {
    const double dy = y - center.y;
    const double rem = radius * radius - dy * dy;
    if (rem < 0.0) continue;
    const double half = std::sqrt(rem);
    // Widened by one pixel on each side; the exact predicate decides.
    const int x0 = std::max(0, static_cast<int>(std::floor(center.x - half)) - 1);
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(center.x + half)) + 1);
    for (int x = x0; x <= x1; ++x) {
      if (in_disk(x, y, center, radius)) visit(x, y);
    }
  }
}

inline BinaryMask rasterize_disk(PixelPoint center, double radius, int width, int height) {
  if (!(radius > 0.0)) throw ParameterError("rasterize_disk: radius must be > 0");
  BinaryMask out(width, height);
  for_each_disk_pixel(center, radius, width, height, [&](int x, int y) { out(x, y) = 1; });
  return out;
}

inline BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out = mask;
  for (auto& bit : out.values()) bit = bit ? 0 : 1;
  return out;
}

inline BinaryMask logical_or(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "logical_or");
  BinaryMask out = a;
  auto dst = out.values();
  auto src = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = dst[i] | src[i];
  return out;
}

}  // namespace seesay
