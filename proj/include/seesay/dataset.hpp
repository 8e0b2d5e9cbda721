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

// Dataset layout:
//
//   <root>/rgb/<id>.png            RGB frames, numeric ids
//   <root>/depth/<id>.png|.pfm     depth per frame (16/8-bit gray or float map)
//   <root>/gt/<id>.png             optional ground-truth unsafe mask (255 = unsafe)
//   <root>/pad_labels.json         optional {"<id>": true|false} pad safety
//   <root>/stub_scene.json         optional script for the stub backends

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seesay/error.hpp"

namespace seesay {

struct FrameRecord {
  std::string frame_id;
  std::filesystem::path rgb_path;
  std::filesystem::path depth_path;
  std::optional<std::filesystem::path> ground_truth_path;
};

inline constexpr std::size_t kBatchSize = 5;
inline constexpr std::size_t kDecisionIndex = kBatchSize - 1;

// Five consecutive selected frames; the last one is the decision frame.
struct FrameBatch {
  std::string batch_id;
  std::array<FrameRecord, kBatchSize> frames;

  const FrameRecord& decision_frame() const { return frames[kDecisionIndex]; }
};

struct IngestResult {
  std::vector<FrameBatch> batches;
  std::vector<std::string> warnings;
};

inline bool is_numeric_id(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

inline std::string batch_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "batch_%03zu", index);
  return buf;
}

// Frames sorted by numeric id, then every `stride`-th one is kept (the
// stride-th, 2*stride-th, ... frame), or exactly `explicit_ids` when given.
// Selected frames are cut into non-overlapping windows of five; a trailing
// partial window is dropped with a warning.
inline IngestResult ingest_dataset(const std::filesystem::path& root, int stride,
                                   const std::vector<std::string>& explicit_ids = {}) {
  namespace fs = std::filesystem;
  if (stride < 1) throw ParameterError("ingest: stride must be >= 1");
  const fs::path rgb_dir = root / "rgb";
  if (!fs::is_directory(rgb_dir)) throw ConfigError("ingest: missing directory " + rgb_dir.string());

  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(rgb_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    const std::string stem = entry.path().stem().string();
    if (is_numeric_id(stem)) ids.push_back(stem);
  }
  std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
    const auto na = std::stoull(a), nb = std::stoull(b);
    return na != nb ? na < nb : a < b;
  });

  IngestResult result;
  std::vector<std::string> selected;
  if (!explicit_ids.empty()) {
    for (const auto& id : explicit_ids) {
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        throw ConfigError("ingest: requested frame " + id + " has no RGB image");
      }
      if (!selected.empty() && std::stoull(id) <= std::stoull(selected.back())) {
        throw ConfigError("ingest: explicit frame ids must be strictly increasing");
      }
      selected.push_back(id);
    }
  } else {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if ((i + 1) % static_cast<std::size_t>(stride) == 0) selected.push_back(ids[i]);
    }
  }

  const std::size_t full = selected.size() / kBatchSize;
  if (selected.size() % kBatchSize != 0) {
    result.warnings.push_back("dropping " + std::to_string(selected.size() % kBatchSize) +
                              " trailing frame(s) that do not fill a batch of 5");
  }
  for (std::size_t b = 0; b < full; ++b) {
    FrameBatch batch;
    batch.batch_id = batch_name(b);
    for (std::size_t k = 0; k < kBatchSize; ++k) {
      const std::string& id = selected[b * kBatchSize + k];
      FrameRecord rec;
      rec.frame_id = id;
      rec.rgb_path = rgb_dir / (id + ".png");
      for (const char* ext : {".png", ".pfm"}) {
        const fs::path candidate = root / "depth" / (id + ext);
        if (fs::exists(candidate)) {
          rec.depth_path = candidate;
          break;
        }
      }
      if (rec.depth_path.empty()) throw ConfigError("ingest: no depth map for frame " + id);
      if (const fs::path gt = root / "gt" / (id + ".png"); fs::exists(gt)) rec.ground_truth_path = gt;
      batch.frames[k] = std::move(rec);
    }
    result.batches.push_back(std::move(batch));
  }
  return result;
}

}  // namespace seesay
