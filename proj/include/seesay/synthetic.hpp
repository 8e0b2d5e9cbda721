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

// Deterministic synthetic scenes: a gently sloped ground plane with a raised
// roof block, a steep dirt mound, a parked car, a pedestrian and an H-marked
// landing pad. The roof and pedestrian drift one pixel per frame. Writes a dataset directory in the ingestion
// layout together with a stub scene and a matching run config.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "seesay/grid.hpp"
#include "seesay/image.hpp"

namespace seesay {

struct SyntheticSpec {
  int width = 192;
  int height = 144;
  int frames = 10;
  std::uint32_t seed = 7;
  // Every pixel hazardous: the detector reports one frame-filling region.
  bool all_unsafe = false;
};

struct SceneRect {
  int x, y, w, h;
  bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
  nlohmann::json to_json() const { return nlohmann::json::array({x, y, w, h}); }
};

struct SyntheticFrameLayout {
  SceneRect roof, car, person, pad;
  double mound_x, mound_y, mound_radius;
};

inline SyntheticFrameLayout synthetic_layout(const SyntheticSpec& spec, int frame) {
  const int shift = frame;
  const int w = spec.width;
  const int h = spec.height;
  return {{w * 5 / 8 + shift, h / 7, w / 4, h / 3},
          {w / 6 + shift, h * 5 / 8, w / 9, h / 14},
          {w * 2 / 5, h / 5 + shift, 4, 8},
          {w * 3 / 8, h * 2 / 3, 16, 12},
          w * 0.78,
          h * 0.76,
          10.0};
}

inline std::string synthetic_frame_id(int frame) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", frame + 1);
  return buf;
}

inline void draw_pad(RgbImage& image, const SceneRect& pad) {
  for (int y = pad.y; y < pad.y + pad.h; ++y) {
    for (int x = pad.x; x < pad.x + pad.w; ++x) {
      const int lx = x - pad.x;
      const int ly = y - pad.y;
      const bool stem = (lx >= 3 && lx <= 4) || (lx >= pad.w - 5 && lx <= pad.w - 4);
      const bool bar = ly >= pad.h / 2 - 1 && ly <= pad.h / 2 && lx >= 3 && lx <= pad.w - 4;
      const bool inner = ly >= 2 && ly < pad.h - 2;
      image(x, y) = inner && (stem || bar) ? Rgb{230, 230, 230} : Rgb{40, 40, 140};
    }
  }
}

inline void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticSpec& spec = {}) {
  namespace fs = std::filesystem;
  const int w = spec.width;
  const int h = spec.height;
  std::mt19937 rng(spec.seed);
  std::uniform_int_distribution<int> noise(-3, 3);

  nlohmann::json detection_frames = nlohmann::json::object();
  nlohmann::json pad_labels = nlohmann::json::object();
  for (int f = 0; f < spec.frames; ++f) {
    const std::string id = synthetic_frame_id(f);
    const SyntheticFrameLayout L = synthetic_layout(spec, f);

    RgbImage rgb(w, h);
    std::vector<std::uint16_t> depth(static_cast<std::size_t>(w) * h);
    BinaryMask truth(w, h, 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        int d = 20000 + 20 * y + noise(rng);
        Rgb c{static_cast<std::uint8_t>(70 + (x * 3 + y) % 16), 120, 60};
        bool unsafe = false;
        const double mound = L.mound_radius - std::hypot(x - L.mound_x, y - L.mound_y);
        if (mound > 0.0) {
          d -= static_cast<int>(900.0 * mound);
          c = {110, 90, 50};
          unsafe = true;
        }
        if (L.roof.contains(x, y)) {
          d = 12000 + noise(rng);
          c = {150, 80, 60};
          unsafe = true;
        }
        if (L.car.contains(x, y)) {
          c = {200, 20, 20};
          unsafe = true;
        }
        if (L.person.contains(x, y)) {
          c = {240, 200, 160};
          unsafe = true;
        }
        rgb(x, y) = c;
        depth[i] = static_cast<std::uint16_t>(d);
        truth(x, y) = spec.all_unsafe ? 1 : static_cast<std::uint8_t>(unsafe);
      }
    }
    draw_pad(rgb, L.pad);

    write_file(root / "rgb" / (id + ".png"), encode_png(rgb));
    write_file(root / "depth" / (id + ".png"), encode_gray16_png(w, h, depth));
    write_file(root / "gt" / (id + ".png"), encode_mask_png(truth));

    nlohmann::json regions = nlohmann::json::array();
    if (spec.all_unsafe) {
      regions.push_back({{"class", "truck"}, {"box", {0, 0, w, h}}, {"confidence", 0.9}});
    } else {
      regions.push_back({{"class", "car"}, {"box", L.car.to_json()}, {"confidence", 0.9}});
      regions.push_back({{"class", "person"}, {"box", L.person.to_json()}, {"confidence", 0.7}});
      regions.push_back({{"class", "brown rooftop"}, {"box", L.roof.to_json()}, {"confidence", 0.8}});
      // Low-confidence shadow that the binarization threshold must reject.
      regions.push_back({{"class", "van"}, {"box", {2, 2, 10, 10}}, {"confidence", 0.3}});
    }
    nlohmann::json frame = {{"regions", regions}};
    // The pad is only localized on even batches so both radius paths run.
    frame["hpad"] = (f / 5) % 2 == 0 ? L.pad.to_json() : nlohmann::json(nullptr);
    detection_frames[id] = frame;
    if (f % 5 == 4) pad_labels[id] = (f / 5) % 2 == 0;
  }

  nlohmann::json agent1 = nlohmann::json::object();
  nlohmann::json agent2 = nlohmann::json::object();
  for (int b = 0; b < spec.frames / 5; ++b) {
    char name[16];
    std::snprintf(name, sizeof name, "batch_%03d", b);
    const bool safe = b % 2 == 0;
    const nlohmann::json verdict = {
        {"landing_pad_safe", safe},
        {"reasoning", safe ? "The pad is clear in all five frames." : "A person walks toward the pad."},
        {"future_prediction", safe ? "Remains clear." : "The person may reach the pad."},
        {"updated_prompt_list", spec.all_unsafe ? nlohmann::json::array({"truck"})
                                                : nlohmann::json::array({"person", "car", "brown rooftop"})}};
    agent1[name] = "```json\n" + verdict.dump(2) + "\n```\n";
    // A full ranking on even batches, a partial one elsewhere.
    nlohmann::json ranked = nlohmann::json::array();
    ranked.push_back({{"index", 1}, {"reason", "Open ground away from the roof."}});
    if (safe) {
      ranked.push_back({{"index", 0}, {"reason", "Highest safe ratio."}});
      ranked.push_back({{"index", 2}, {"reason", "Close to the image centre."}});
    }
    agent2[name] = nlohmann::json{{"ranked", ranked}}.dump();
  }

  const nlohmann::json scene = {{"detection", {{"frames", detection_frames}}},
                                {"vlm", {{"agent1", agent1}, {"agent2", agent2}}}};
  write_text_file(root / "stub_scene.json", scene.dump(2) + "\n");
  write_text_file(root / "pad_labels.json", pad_labels.dump(2) + "\n");

  const nlohmann::json config = {{"flatness", {{"grad_threshold", 0.05}}},
                                 {"zones", {{"default_radius", 24.0}}},
                                 {"runs", 1},
                                 {"stride", 1}};
  write_text_file(root / "config.json", config.dump(2) + "\n");
}

}  // namespace seesay
