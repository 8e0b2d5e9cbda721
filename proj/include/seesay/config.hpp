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

// Run configuration. Every hyperparameter has its published default and can
// be overridden from a JSON file; only API keys come from the environment.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seesay/agents.hpp"
#include "seesay/detection_backends.hpp"
#include "seesay/flatness.hpp"
#include "seesay/image.hpp"
#include "seesay/semantic.hpp"
#include "seesay/vlm_backends.hpp"
#include "seesay/zones.hpp"

namespace seesay {

enum class BackendKind { live, replay, stub };

inline BackendKind backend_from_string(const std::string& name) {
  if (name == "live") return BackendKind::live;
  if (name == "replay") return BackendKind::replay;
  if (name == "stub") return BackendKind::stub;
  throw ConfigError("unknown backend '" + name + "' (expected live, replay or stub)");
}

inline std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::live: return "live";
    case BackendKind::replay: return "replay";
    case BackendKind::stub: return "stub";
  }
  return "unknown";
}

struct RunConfig {
  FlatnessParams flatness;
  ZoneParams zones;
  double theta_d = 0.5;
  PromptVocabulary initial_vocabulary = PromptVocabulary::visdrone10();
  Agent1Mode agent1_mode = Agent1Mode::multi_frame;
  int refinement_iterations = 1;

  BackendKind backend = BackendKind::stub;
  std::filesystem::path fixtures_dir = "fixtures";
  std::optional<std::filesystem::path> stub_scene;  // default <dataset>/stub_scene.json
  LiveDetectionConfig live_detection;
  LiveVlmConfig live_vlm;

  int runs = 5;
  int stride = 29;
  std::vector<std::string> frame_ids;  // explicit selection; overrides stride
  std::map<std::string, std::string> preferences;  // batch id -> preference
  std::string default_preference = "No specific preference.";
  std::filesystem::path output_dir = "out";
  int workers = 1;

  const std::string& preference_for(const std::string& batch_id) const {
    auto it = preferences.find(batch_id);
    return it == preferences.end() ? default_preference : it->second;
  }

  void validate() const {
    flatness.validate();
    zones.validate();
    if (!(theta_d >= 0.0 && theta_d <= 1.0)) throw ConfigError("theta_d must lie in [0,1]");
    if (refinement_iterations < 0) throw ConfigError("refinement_iterations must be >= 0");
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (stride < 1) throw ConfigError("stride must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (backend == BackendKind::live && live_detection.endpoint.empty()) {
      throw ConfigError("live backend needs live.detection_endpoint");
    }
  }
};

namespace detail {
template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& target) {
  if (j.contains(key) && !j[key].is_null()) target = j[key].get<T>();
}
}  // namespace detail

// Applies the keys present in `j` on top of `base`. Unknown keys are
// rejected so typos do not silently fall back to defaults.
inline RunConfig apply_config_json(RunConfig base, const nlohmann::json& j) {
  static const std::vector<std::string> known = {"flatness", "semantic", "zones", "agents", "backend",
                                                 "fixtures_dir", "stub_scene", "live", "runs", "stride",
                                                 "frame_ids", "preferences", "default_preference",
                                                 "output_dir", "workers"};
  if (!j.is_object()) throw ConfigError("config root must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  try {
    RunConfig c = std::move(base);
    if (j.contains("flatness")) {
      const auto& f = j["flatness"];
      detail::read_opt(f, "sigma", c.flatness.sigma);
      detail::read_opt(f, "grad_threshold", c.flatness.grad_threshold);
      detail::read_opt(f, "window", c.flatness.window);
      detail::read_opt(f, "flat_ratio", c.flatness.flat_ratio);
      detail::read_opt(f, "morph_size", c.flatness.morph_size);
      detail::read_opt(f, "epsilon", c.flatness.epsilon);
      if (f.contains("min_component_area")) {
        c.flatness.min_component_area =
            f["min_component_area"].is_null() ? std::nullopt : std::optional<long>(f["min_component_area"].get<long>());
      }
    }
    if (j.contains("semantic")) {
      const auto& s = j["semantic"];
      detail::read_opt(s, "theta_d", c.theta_d);
      if (s.contains("initial_vocabulary")) {
        c.initial_vocabulary = PromptVocabulary(s["initial_vocabulary"].get<std::vector<std::string>>());
      }
    }
    if (j.contains("zones")) {
      const auto& z = j["zones"];
      detail::read_opt(z, "default_radius", c.zones.default_radius);
      detail::read_opt(z, "eta", c.zones.eta);
      detail::read_opt(z, "top_k", c.zones.top_k);
      detail::read_opt(z, "top_n", c.zones.top_n);
    }
    if (j.contains("agents")) {
      const auto& a = j["agents"];
      if (a.contains("mode")) {
        const auto mode = a["mode"].get<std::string>();
        if (mode == "multi-frame") c.agent1_mode = Agent1Mode::multi_frame;
        else if (mode == "single-frame") c.agent1_mode = Agent1Mode::single_frame;
        else throw ConfigError("agents.mode must be multi-frame or single-frame");
      }
      detail::read_opt(a, "refinement_iterations", c.refinement_iterations);
    }
    if (j.contains("backend")) c.backend = backend_from_string(j["backend"].get<std::string>());
    if (j.contains("fixtures_dir")) c.fixtures_dir = j["fixtures_dir"].get<std::string>();
    if (j.contains("stub_scene")) c.stub_scene = j["stub_scene"].get<std::string>();
    if (j.contains("live")) {
      const auto& l = j["live"];
      detail::read_opt(l, "detection_endpoint", c.live_detection.endpoint);
      detail::read_opt(l, "detection_api_key_env", c.live_detection.api_key_env);
      detail::read_opt(l, "hpad_prompt", c.live_detection.hpad_prompt);
      detail::read_opt(l, "vlm_endpoint", c.live_vlm.endpoint);
      detail::read_opt(l, "vlm_model", c.live_vlm.model);
      detail::read_opt(l, "vlm_api_key_env", c.live_vlm.api_key_env);
      if (l.contains("max_retries")) {
        c.live_detection.retry.max_retries = c.live_vlm.retry.max_retries = l["max_retries"].get<int>();
      }
    }
    detail::read_opt(j, "runs", c.runs);
    detail::read_opt(j, "stride", c.stride);
    detail::read_opt(j, "frame_ids", c.frame_ids);
    detail::read_opt(j, "preferences", c.preferences);
    detail::read_opt(j, "default_preference", c.default_preference);
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    detail::read_opt(j, "workers", c.workers);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path), nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return apply_config_json(std::move(base), j);
}

// prefs_json: {"<batch id>": "<preference string>", ...}
inline std::map<std::string, std::string> load_preferences(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text_file(path)).get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse preferences " + path.string() + ": " + e.what());
  }
}

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  return {{"flatness",
           {{"sigma", c.flatness.sigma},
            {"grad_threshold", c.flatness.grad_threshold},
            {"window", c.flatness.window},
            {"flat_ratio", c.flatness.flat_ratio},
            {"morph_size", c.flatness.morph_size},
            {"min_component_area",
             c.flatness.min_component_area ? nlohmann::ordered_json(*c.flatness.min_component_area) : nullptr},
            {"epsilon", c.flatness.epsilon}}},
          {"semantic", {{"theta_d", c.theta_d}, {"initial_vocabulary", c.initial_vocabulary.classes()}}},
          {"zones",
           {{"default_radius", c.zones.default_radius},
            {"eta", c.zones.eta},
            {"top_k", c.zones.top_k},
            {"top_n", c.zones.top_n}}},
          {"agents",
           {{"mode", c.agent1_mode == Agent1Mode::multi_frame ? "multi-frame" : "single-frame"},
            {"refinement_iterations", c.refinement_iterations}}},
          {"backend", to_string(c.backend)},
          {"runs", c.runs},
          {"stride", c.stride}};
}

}  // namespace seesay
