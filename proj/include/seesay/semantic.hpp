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

// Open-vocabulary hazard branch: prompt vocabulary, per-class confidence
// masks, the detector backend interface, max-aggregation and binarization.

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seesay/grid.hpp"
#include "seesay/image.hpp"

namespace seesay {

inline std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

inline std::string casefold(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Ordered list of detector prompts. Entries are trimmed; empty entries are
// dropped; duplicates (compared case-insensitively) keep their first spelling.
class PromptVocabulary {
 public:
  PromptVocabulary() = default;
  PromptVocabulary(std::initializer_list<std::string> classes)
      : PromptVocabulary(std::vector<std::string>(classes)) {}
  explicit PromptVocabulary(const std::vector<std::string>& classes) {
    for (const auto& raw : classes) add(raw);
  }

  // VisDrone's ten categories, the default starting vocabulary.
  static PromptVocabulary visdrone10() {
    return PromptVocabulary{"person", "pedestrian", "people",   "bicycle", "car",
                            "van",    "truck",      "awning-tricycle", "bus", "motor"};
  }

  const std::vector<std::string>& classes() const { return classes_; }
  bool empty() const { return classes_.empty(); }
  std::size_t size() const { return classes_.size(); }

  bool contains(std::string_view name) const {
    const std::string key = casefold(trim(name));
    return std::any_of(classes_.begin(), classes_.end(),
                       [&](const std::string& c) { return casefold(c) == key; });
  }

  // Order-insensitive digest used to key replay fixtures.
  std::string hash() const {
    std::vector<std::string> keys;
    keys.reserve(classes_.size());
    for (const auto& c : classes_) keys.push_back(casefold(c));
    std::sort(keys.begin(), keys.end());
    std::string joined;
    for (const auto& k : keys) {
      joined += k;
      joined.push_back('\n');
    }
    return sha256_hex(joined).substr(0, 16);
  }

  friend bool operator==(const PromptVocabulary&, const PromptVocabulary&) = default;

 private:
  void add(std::string_view raw) {
    std::string entry = trim(raw);
    if (entry.empty() || contains(entry)) return;
    classes_.push_back(std::move(entry));
  }

  std::vector<std::string> classes_;
};

// Per-class confidence grids in [0,1], all of one size.
class ClassMaskSet {
 public:
  ClassMaskSet(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ParameterError("ClassMaskSet: dimensions must be >= 1");
  }

  int width() const { return width_; }
  int height() const { return height_; }

  void add(std::string name, ScalarGrid mask) {
    if (mask.width() != width_ || mask.height() != height_) {
      throw StructuralError("ClassMaskSet: mask for '" + name + "' has wrong dimensions");
    }
    for (double v : mask.values()) {
      if (v < 0.0 || v > 1.0) {
        throw ParameterError("ClassMaskSet: mask for '" + name + "' has values outside [0,1]");
      }
    }
    masks_.emplace_back(std::move(name), std::move(mask));
  }

  const std::vector<std::pair<std::string, ScalarGrid>>& masks() const { return masks_; }
  bool empty() const { return masks_.empty(); }

  const ScalarGrid* find(std::string_view name) const {
    const std::string key = casefold(name);
    for (const auto& [n, m] : masks_) {
      if (casefold(n) == key) return &m;
    }
    return nullptr;
  }

  friend bool operator==(const ClassMaskSet&, const ClassMaskSet&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::pair<std::string, ScalarGrid>> masks_;
};

// A frame as seen by backends: its id (for fixture keying) and pixels.
struct FrameView {
  std::string frame_id;
  const RgbImage& image;
};

// Open-vocabulary detector. detect() is total: classes the model does not
// recognise come back as all-zero masks, one mask per vocabulary entry.
// Implementations must be safe to share across threads.
class DetectionBackend {
 public:
  virtual ~DetectionBackend() = default;
  virtual ClassMaskSet detect(const FrameView& frame, const PromptVocabulary& vocabulary) = 0;
  // Bounding box of the "H" landing pad, when the backend can find one.
  virtual std::optional<BoundingBox> locate_hpad(const FrameView&) { return std::nullopt; }
};

// Pixelwise maximum over classes. An empty set yields zeros.
inline ScalarGrid aggregate_unsafe(const ClassMaskSet& masks) {
  ScalarGrid out(masks.width(), masks.height(), 0.0);
  for (const auto& [name, mask] : masks.masks()) {
    require_same_shape(out, mask, "aggregate_unsafe");
    auto dst = out.values();
    auto src = mask.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
  }
  return out;
}

// 1 where value >= theta_d.
inline BinaryMask binarize(const ScalarGrid& unsafe, double theta_d) {
  if (!(theta_d >= 0.0 && theta_d <= 1.0)) {
    throw ParameterError("binarize: theta_d must lie in [0,1]");
  }
  BinaryMask out(unsafe.width(), unsafe.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = unsafe.values()[i] >= theta_d ? 1 : 0;
  }
  return out;
}

inline BinaryMask detect_and_binarize(DetectionBackend& backend, const FrameView& frame,
                                      const PromptVocabulary& vocabulary, double theta_d) {
  const ClassMaskSet masks = backend.detect(frame, vocabulary);
  if (masks.width() != frame.image.width() || masks.height() != frame.image.height()) {
    throw StructuralError("detect_and_binarize: backend returned masks of the wrong size");
  }
  return binarize(aggregate_unsafe(masks), theta_d);
}

// Run-length code of a row-major grid: (run length, value) pairs with no two
// neighbouring runs sharing a value.
template <typename T>
std::vector<std::pair<std::size_t, T>> run_length_encode(std::span<const T> values) {
  std::vector<std::pair<std::size_t, T>> runs;
  for (T v : values) {
    if (!runs.empty() && runs.back().second == v) {
      ++runs.back().first;
    } else {
      runs.emplace_back(1, v);
    }
  }
  return runs;
}

template <typename T>
std::vector<T> run_length_decode(const std::vector<std::pair<std::size_t, T>>& runs,
                                 std::size_t expected) {
  std::vector<T> values;
  values.reserve(expected);
  for (const auto& [count, v] : runs) {
    if (count > expected - values.size()) throw ParseError("rle: runs exceed grid size", "");
    values.insert(values.end(), count, v);
  }
  if (values.size() != expected) throw ParseError("rle: runs do not cover the grid", "");
  return values;
}

// Binary run-length form used on the wire: alternating run lengths starting
// with a run of zeros (possibly of length 0).
inline std::vector<std::size_t> binary_rle_encode(const BinaryMask& mask) {
  std::vector<std::size_t> counts;
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (auto bit : mask.values()) {
    if (bit != current) {
      counts.push_back(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  counts.push_back(run);
  return counts;
}

inline BinaryMask binary_rle_decode(const std::vector<std::size_t>& counts, int width, int height) {
  std::vector<std::uint8_t> bits;
  const std::size_t expected = static_cast<std::size_t>(width) * height;
  bits.reserve(expected);
  std::uint8_t current = 0;
  for (std::size_t count : counts) {
    if (count > expected - bits.size()) throw ParseError("rle: runs exceed mask size", "");
    bits.insert(bits.end(), count, current);
    current ^= 1;
  }
  if (bits.size() != expected) throw ParseError("rle: runs do not cover the mask", "");
  return BinaryMask(width, height, std::move(bits));
}

}  // namespace seesay
