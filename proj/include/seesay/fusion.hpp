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

#include <cstdint>
#include <string>

#include "seesay/grid.hpp"
#include "seesay/image.hpp"
#include "seesay/imgcore.hpp"

namespace seesay {

enum class Provenance { initial, refined, geometric_only, semantic_only };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::initial: return "initial";
    case Provenance::refined: return "refined";
    case Provenance::geometric_only: return "geometric-only";
    case Provenance::semantic_only: return "semantic-only";
  }
  return "unknown";
}

// Binary unsafe map (1 = unsafe) for the decision frame.
struct SafetyMap {
  BinaryMask unsafe;
  Provenance provenance = Provenance::initial;
};

// Pessimistic fusion: a pixel is unsafe if either branch flags it.
inline SafetyMap fuse(const BinaryMask& semantic, const BinaryMask& geometric,
                      Provenance provenance = Provenance::initial) {
  require_same_shape(semantic, geometric, "fuse");
  return {logical_or(semantic, geometric), provenance};
}

inline constexpr Rgb kSafeTint{0, 255, 0};
inline constexpr Rgb kUnsafeTint{255, 0, 0};
// Tint weight in percent.
inline constexpr int kOverlayAlphaPercent = 35;

inline std::uint8_t blend_channel(std::uint8_t base, std::uint8_t tint, int alpha_percent) {
  return static_cast<std::uint8_t>(
      (base * (100 - alpha_percent) + tint * alpha_percent + 50) / 100);
}

inline Rgb blend(Rgb base, Rgb tint, int alpha_percent) {
  return {blend_channel(base.r, tint.r, alpha_percent), blend_channel(base.g, tint.g, alpha_percent),
          blend_channel(base.b, tint.b, alpha_percent)};
}

// Red over unsafe pixels, green over safe ones, alpha 0.35. Integer
// arithmetic keeps the bytes identical across platforms.
inline RgbImage render_overlay(const RgbImage& rgb, const SafetyMap& map) {
  require_same_shape(rgb, map.unsafe, "render_overlay");
  RgbImage out = rgb;
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      out(x, y) = blend(rgb(x, y), map.unsafe(x, y) ? kUnsafeTint : kSafeTint, kOverlayAlphaPercent);
    }
  }
  return out;
}

}  // namespace seesay
