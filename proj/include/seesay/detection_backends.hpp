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

// DetectionBackend implementations: synthetic stub, fixture replay, fixture
// recorder, and the live HTTP client.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seesay/http.hpp"
#include "seesay/image.hpp"
#include "seesay/semantic.hpp"

namespace seesay {

// ---------------------------------------------------------------------------
// Stub: each frame carries a script of labelled rectangles. Classes present
// in the vocabulary get their rectangles painted at the given confidence.

struct StubRegion {
  std::string label;
  BoundingBox box;  // integer pixel box [x, x+w) x [y, y+h), clipped
  double confidence = 1.0;
};

struct StubFrameScript {
  std::vector<StubRegion> regions;
  std::optional<BoundingBox> hpad;
};

struct StubScene {
  std::map<std::string, StubFrameScript> frames;
  // Used for frame ids with no entry of their own.
  StubFrameScript fallback;

  const StubFrameScript& script_for(const std::string& frame_id) const {
    auto it = frames.find(frame_id);
    return it == frames.end() ? fallback : it->second;
  }
};

inline BoundingBox box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("box must be [x, y, w, h]", j.dump());
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline nlohmann::json box_to_json(const BoundingBox& b) {
  return nlohmann::json::array({b.x, b.y, b.width, b.height});
}

inline StubFrameScript stub_frame_from_json(const nlohmann::json& j) {
  StubFrameScript script;
  for (const auto& r : j.value("regions", nlohmann::json::array())) {
    script.regions.push_back(
        {r.at("class").get<std::string>(), box_from_json(r.at("box")), r.value("confidence", 1.0)});
  }
  if (j.contains("hpad") && !j["hpad"].is_null()) script.hpad = box_from_json(j["hpad"]);
  return script;
}

// {"frames": {"<id>": {"regions": [{"class", "box", "confidence"}], "hpad": [..]}},
//  "default": {...}}
inline StubScene stub_scene_from_json(const nlohmann::json& j) {
  StubScene scene;
  if (j.contains("frames")) {
    for (const auto& [id, frame] : j["frames"].items()) scene.frames[id] = stub_frame_from_json(frame);
  }
  if (j.contains("default")) scene.fallback = stub_frame_from_json(j["default"]);
  return scene;
}

class StubDetectionBackend : public DetectionBackend {
 public:
  explicit StubDetectionBackend(StubScene scene) : scene_(std::move(scene)) {}

  ClassMaskSet detect(const FrameView& frame, const PromptVocabulary& vocabulary) override {
    const int w = frame.image.width();
    const int h = frame.image.height();
    const auto& script = scene_.script_for(frame.frame_id);
    ClassMaskSet out(w, h);
    for (const auto& cls : vocabulary.classes()) {
      ScalarGrid mask(w, h, 0.0);
      const std::string key = casefold(cls);
      for (const auto& region : script.regions) {
        if (casefold(region.label) != key) continue;
        const int x0 = std::max(0, static_cast<int>(region.box.x));
        const int y0 = std::max(0, static_cast<int>(region.box.y));
        const int x1 = std::min(w, static_cast<int>(region.box.x + region.box.width));
        const int y1 = std::min(h, static_cast<int>(region.box.y + region.box.height));
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) mask(x, y) = std::max(mask(x, y), region.confidence);
        }
      }
      out.add(cls, std::move(mask));
    }
    return out;
  }

  std::optional<BoundingBox> locate_hpad(const FrameView& frame) override {
    return scene_.script_for(frame.frame_id).hpad;
  }

 private:
  StubScene scene_;
};

// ---------------------------------------------------------------------------
// Fixture files. One detection fixture per (frame id, vocabulary hash):
//
//   {"format": "seesay-detection/1", "frame_id": "...", "width": W,
//    "height": H, "classes": [...],
//    "masks": [{"class": "...", "runs": [[length, value], ...]}, ...]}
//
// Values are written with round-trip precision, so decoding reproduces the
// recorded grids bit for bit. Landing-pad lookups go to hpad_<frame>.json.

inline constexpr const char* kDetectionFixtureFormat = "seesay-detection/1";

inline std::filesystem::path detection_fixture_path(const std::filesystem::path& dir,
                                                    const std::string& frame_id,
                                                    const PromptVocabulary& vocabulary) {
  return dir / ("det_" + frame_id + "_" + vocabulary.hash() + ".json");
}

inline std::filesystem::path hpad_fixture_path(const std::filesystem::path& dir,
                                               const std::string& frame_id) {
  return dir / ("hpad_" + frame_id + ".json");
}

inline nlohmann::json detection_fixture_to_json(const std::string& frame_id,
                                                const ClassMaskSet& masks) {
  nlohmann::json classes = nlohmann::json::array();
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [name, grid] : masks.masks()) {
    classes.push_back(name);
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& [count, value] : run_length_encode(grid.values())) {
      runs.push_back(nlohmann::json::array({count, value}));
    }
    entries.push_back({{"class", name}, {"runs", std::move(runs)}});
  }
  return {{"format", kDetectionFixtureFormat},
          {"frame_id", frame_id},
          {"width", masks.width()},
          {"height", masks.height()},
          {"classes", std::move(classes)},
          {"masks", std::move(entries)}};
}

inline ClassMaskSet detection_fixture_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kDetectionFixtureFormat) {
      throw ParseError("unknown detection fixture format", j.dump());
    }
    const int w = j.at("width").get<int>();
    const int h = j.at("height").get<int>();
    ClassMaskSet out(w, h);
    for (const auto& entry : j.at("masks")) {
      std::vector<std::pair<std::size_t, double>> runs;
      for (const auto& r : entry.at("runs")) runs.emplace_back(r.at(0).get<std::size_t>(), r.at(1).get<double>());
      out.add(entry.at("class").get<std::string>(),
              ScalarGrid(w, h, run_length_decode(runs, static_cast<std::size_t>(w) * h)));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed detection fixture: ") + e.what(), j.dump());
  }
}

// Serves recorded responses. A missing fixture is a configuration problem,
// never silently treated as "no hazards".
class ReplayDetectionBackend : public DetectionBackend {
 public:
  explicit ReplayDetectionBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

  ClassMaskSet detect(const FrameView& frame, const PromptVocabulary& vocabulary) override {
    const auto path = detection_fixture_path(dir_, frame.frame_id, vocabulary);
    if (!std::filesystem::exists(path)) {
      throw ConfigError("missing detection fixture " + path.string());
    }
    return detection_fixture_from_json(nlohmann::json::parse(read_text_file(path)));
  }

  std::optional<BoundingBox> locate_hpad(const FrameView& frame) override {
    const auto path = hpad_fixture_path(dir_, frame.frame_id);
    if (!std::filesystem::exists(path)) return std::nullopt;
    const auto j = nlohmann::json::parse(read_text_file(path));
    if (j.at("bbox").is_null()) return std::nullopt;
    return box_from_json(j["bbox"]);
  }

 private:
  std::filesystem::path dir_;
};

// Forwards to another backend and writes every answer as a replay fixture.
class RecordingDetectionBackend : public DetectionBackend {
 public:
  RecordingDetectionBackend(DetectionBackend& inner, std::filesystem::path dir)
      : inner_(inner), dir_(std::move(dir)) {}

  ClassMaskSet detect(const FrameView& frame, const PromptVocabulary& vocabulary) override {
    ClassMaskSet masks = inner_.detect(frame, vocabulary);
    const std::string text = detection_fixture_to_json(frame.frame_id, masks).dump() + "\n";
    std::lock_guard lock(mutex_);
    write_text_file(detection_fixture_path(dir_, frame.frame_id, vocabulary), text);
    return masks;
  }

  std::optional<BoundingBox> locate_hpad(const FrameView& frame) override {
    auto box = inner_.locate_hpad(frame);
    nlohmann::json j = {{"frame_id", frame.frame_id},
                        {"bbox", box ? box_to_json(*box) : nlohmann::json(nullptr)}};
    std::lock_guard lock(mutex_);
    write_text_file(hpad_fixture_path(dir_, frame.frame_id), j.dump() + "\n");
    return box;
  }

 private:
  DetectionBackend& inner_;
  std::filesystem::path dir_;
  std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Live client.
//
// Request:  {"image": "<base64 PNG>", "prompts": ["person", ...]}
// Response: {"masks": {"<class>": {"rle": [zeros, ones, zeros, ...],
//                                  "confidence": 0.87}, ...}}
// A class's grid is `confidence` on its RLE pixels and 0 elsewhere. Classes
// absent from the response get zero masks.

struct LiveDetectionConfig {
  std::string endpoint;  // full URL of the detect route
  std::string api_key_env = "DETECTION_API_KEY";
  std::string hpad_prompt = "landing pad with H";
  RetryPolicy retry;
};

inline ClassMaskSet parse_detection_response(const std::string& body, int width, int height,
                                             const PromptVocabulary& vocabulary) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("detection response is not JSON: ") + e.what(), body);
  }
  const nlohmann::json masks = j.value("masks", nlohmann::json::object());
  ClassMaskSet out(width, height);
  for (const auto& cls : vocabulary.classes()) {
    ScalarGrid grid(width, height, 0.0);
    for (const auto& [name, entry] : masks.items()) {
      if (casefold(name) != casefold(cls)) continue;
      try {
        const double confidence = entry.value("confidence", 1.0);
        const BinaryMask bits =
            binary_rle_decode(entry.at("rle").get<std::vector<std::size_t>>(), width, height);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          if (bits.values()[i]) grid.values()[i] = std::max(grid.values()[i], confidence);
        }
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad mask entry for '") + name + "': " + e.what(), body);
      }
    }
    out.add(cls, std::move(grid));
  }
  return out;
}

class LiveDetectionBackend : public DetectionBackend {
 public:
  explicit LiveDetectionBackend(LiveDetectionConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw ConfigError("live detection: endpoint not configured");
  }

  ClassMaskSet detect(const FrameView& frame, const PromptVocabulary& vocabulary) override {
    nlohmann::json request = {{"image", base64_encode(encode_png(frame.image))},
                              {"prompts", vocabulary.classes()}};
    std::map<std::string, std::string> headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers["Authorization"] = std::string("Bearer ") + key;
    }
    std::string body;
    {
      std::lock_guard lock(mutex_);  // one request in flight per client
      body = post_json(config_.endpoint, request.dump(), headers, config_.retry);
    }
    return parse_detection_response(body, frame.image.width(), frame.image.height(), vocabulary);
  }

  std::optional<BoundingBox> locate_hpad(const FrameView& frame) override {
    const ClassMaskSet masks = detect(frame, PromptVocabulary{config_.hpad_prompt});
    const ScalarGrid& grid = masks.masks().front().second;
    int x0 = grid.width(), y0 = grid.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < grid.height(); ++y) {
      for (int x = 0; x < grid.width(); ++x) {
        if (grid(x, y) <= 0.0) continue;
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
    if (x1 < 0) return std::nullopt;
    return BoundingBox{static_cast<double>(x0), static_cast<double>(y0),
                       static_cast<double>(x1 - x0 + 1), static_cast<double>(y1 - y0 + 1)};
  }

 private:
  LiveDetectionConfig config_;
  std::mutex mutex_;
};

}  // namespace seesay
