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

// Geometry branch: per-frame depth normalization and the gradient-vote
// flatness mask. Bit 1 in the flatness mask means flat/safe; bit 1 in the
// mask returned by gradient_unsafe means unsafe.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "seesay/grid.hpp"
#include "seesay/imgcore.hpp"

namespace seesay {

struct FlatnessParams {
  double sigma = 1.0;
  // Compared against gradients of the [0,1]-normalized depth, in units per
  // pixel. With central differences such gradients rarely exceed 0.5, so the
  // default of 1.0 only rejects very steep discontinuities.
  double grad_threshold = 1.0;
  int window = 3;
  double flat_ratio = 0.4;
  int morph_size = 5;
  // Components smaller than this are removed after morphology. When unset,
  // 0.1% of the image pixel count (rounded down) is used.
  std::optional<long> min_component_area;
  double epsilon = 1e-6;

  void validate() const {
    if (!(sigma > 0.0)) throw ParameterError("flatness: sigma must be > 0");
    if (!(grad_threshold > 0.0)) throw ParameterError("flatness: grad_threshold must be > 0");
    if (window < 1 || window % 2 == 0) throw ParameterError("flatness: window must be odd and >= 1");
    if (!(flat_ratio >= 0.0 && flat_ratio <= 1.0)) {
      throw ParameterError("flatness: flat_ratio must lie in [0,1]");
    }
    if (morph_size < 1 || morph_size % 2 == 0) {
      throw ParameterError("flatness: morph_size must be odd and >= 1");
    }
    if (min_component_area && *min_component_area < 0) {
      throw ParameterError("flatness: min_component_area must be >= 0");
    }
    if (!(epsilon > 0.0)) throw ParameterError("flatness: epsilon must be > 0");
  }

  long component_area_for(int width, int height) const {
    if (min_component_area) return *min_component_area;
    return static_cast<long>(std::floor(0.001 * static_cast<double>(width) * height));
  }
};

// Depth rescaled into [0, 1) by per-frame min-max.
class NormalizedDepth {
 public:
  const ScalarGrid& grid() const { return grid_; }

 private:
  explicit NormalizedDepth(ScalarGrid grid) : grid_(std::move(grid)) {}
  friend NormalizedDepth normalize_depth(const ScalarGrid&, double);
  friend NormalizedDepth assume_normalized(ScalarGrid);
  ScalarGrid grid_;
};

inline NormalizedDepth normalize_depth(const ScalarGrid& depth, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("normalize_depth: epsilon must be > 0");
  const auto [lo_it, hi_it] = std::minmax_element(depth.values().begin(), depth.values().end());
  const double lo = *lo_it;
  const double denom = (*hi_it - lo) + epsilon;
  ScalarGrid out = depth;
  for (double& v : out.values()) v = (v - lo) / denom;
  return NormalizedDepth(std::move(out));
}

// Wraps a grid that is already in [0,1]; throws otherwise.
inline NormalizedDepth assume_normalized(ScalarGrid grid) {
  for (double v : grid.values()) {
    if (v < 0.0 || v > 1.0) throw ParameterError("assume_normalized: value outside [0,1]");
  }
  return NormalizedDepth(std::move(grid));
}

// Per-pixel window vote: 1 iff the fraction of pixels in the (clipped) w x w
// window whose gradient is strictly below the threshold reaches flat_ratio.
inline BinaryMask gradient_vote(const ScalarGrid& gradient, double grad_threshold, int window,
                                double flat_ratio) {
  const int w = gradient.width();
  const int h = gradient.height();
  const int r = window / 2;
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int below = 0;
      int total = 0;
      for (int v = std::max(0, y - r); v <= std::min(h - 1, y + r); ++v) {
        for (int u = std::max(0, x - r); u <= std::min(w - 1, x + r); ++u) {
          ++total;
          if (gradient(u, v) < grad_threshold) ++below;
        }
      }
      out(x, y) = static_cast<double>(below) / total >= flat_ratio ? 1 : 0;
    }
  }
  return out;
}

// smooth -> gradient -> window vote -> open/close -> small-component removal.
inline BinaryMask flatness_mask(const NormalizedDepth& depth, const FlatnessParams& params) {
  params.validate();
  const ScalarGrid& d = depth.grid();
  if (d.width() < params.window || d.height() < params.window) {
    throw ParameterError("flatness_mask: image " + std::to_string(d.width()) + "x" +
                         std::to_string(d.height()) + " smaller than window " +
                         std::to_string(params.window));
  }
  const ScalarGrid smooth = gaussian_smooth(d, params.sigma);
  const ScalarGrid gradient = gradient_magnitude(smooth);
  BinaryMask flat = gradient_vote(gradient, params.grad_threshold, params.window, params.flat_ratio);
  flat = morph_open_close(flat, StructuringElement(params.morph_size));
  return remove_small_components(flat, params.component_area_for(d.width(), d.height()));
}

inline BinaryMask gradient_unsafe(const BinaryMask& flat) { return complement(flat); }

}  // namespace seesay
