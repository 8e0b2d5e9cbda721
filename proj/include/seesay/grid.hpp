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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "seesay/error.hpp"

namespace seesay {

// Dense row-major H x W grid. Used for continuous maps (depth, gradient
// magnitude, detector confidence) and for binary masks.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    check_dims(width, height);
    values_.assign(static_cast<std::size_t>(width) * height, fill);
    check_values();
  }

  Grid(int width, int height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * height) {
      throw StructuralError("grid: expected " +
                            std::to_string(static_cast<std::size_t>(width) * height) +
                            " values, got " + std::to_string(values_.size()));
    }
    check_values();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  T& operator()(int x, int y) { return values_[index(x, y)]; }
  const T& operator()(int x, int y) const { return values_[index(x, y)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw ParameterError("grid: dimensions must be >= 1, got " +
                           std::to_string(width) + "x" + std::to_string(height));
    }
  }

  void check_values() const {
    if constexpr (std::is_floating_point_v<T>) {
      for (T v : values_) {
        if (!std::isfinite(v)) throw ParameterError("grid: non-finite value");
      }
    } else if constexpr (std::is_same_v<T, std::uint8_t>) {
      for (T v : values_) {
        if (v > 1) throw ParameterError("mask: bit values must be 0 or 1");
      }
    }
  }

  int width_;
  int height_;
  std::vector<T> values_;
};

using ScalarGrid = Grid<double>;

// Bits are 0/1. Whether 1 means "unsafe" or "flat" depends on the map; see
// the producing function.
using BinaryMask = Grid<std::uint8_t>;

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw StructuralError(std::string(what) + ": dimension mismatch " +
                          std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                          " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()));
  }
}

inline std::size_t popcount(const BinaryMask& mask) {
  std::size_t n = 0;
  for (auto bit : mask.values()) n += bit;
  return n;
}

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

// Axis-aligned box in pixels: top-left corner plus extent.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

}  // namespace seesay
