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

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include "json.hpp"
#include "seesay/agents.hpp"
#include "seesay/http.hpp"
#include "seesay/image.hpp"

namespace seesay {

// Canned replies for tests and the stub pipeline. The responder may throw
// TransportError to simulate an outage.
class ScriptedVlmBackend : public VlmBackend {
 public:
  using Responder = std::function<std::string(const VlmRequest&)>;

  explicit ScriptedVlmBackend(Responder responder) : responder_(std::move(responder)) {}

  std::string complete(const VlmRequest& request) override {
    std::lock_guard lock(mutex_);
    ++calls_;
    return responder_(request);
  }

  int calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

  // A backend whose every call fails with a transport error.
  static ScriptedVlmBackend failing() {
    return ScriptedVlmBackend([](const VlmRequest&) -> std::string {
      throw TransportError("scripted outage", 1);
    });
  }

 private:
  Responder responder_;
  mutable std::mutex mutex_;
  int calls_ = 0;
};

// Replies from a stub scene file:
//   {"agent1": {"<batch id>" | "default": "<reply>" | null}, "agent2": {...}}
// A null reply (or no entry at all) makes the call fail like an outage.
inline ScriptedVlmBackend::Responder scripted_responder_from_json(const nlohmann::json& scene) {
  return [scene](const VlmRequest& request) -> std::string {
    const std::string role = to_string(request.agent);
    if (scene.contains(role)) {
      const auto& table = scene[role];
      for (const std::string& key : {request.tag.batch_id, std::string("default")}) {
        if (!table.contains(key)) continue;
        const auto& reply = table[key];
        if (reply.is_null()) break;
        return reply.is_string() ? reply.get<std::string>() : reply.dump();
      }
    }
    throw TransportError("scripted backend has no reply for " + role + " in " + request.tag.batch_id, 1);
  };
}

// Fixture name for a raw reply: vlm_<batch>_<agent>_run<k>.txt, with an
// _iter<i> suffix for Agent 1 refinement rounds after the first.
inline std::filesystem::path vlm_fixture_path(const std::filesystem::path& dir, const VlmRequest& request) {
  std::string name = "vlm_" + request.tag.batch_id + "_" + to_string(request.agent) + "_run" +
                     std::to_string(request.tag.run);
  if (request.tag.iteration > 0) name += "_iter" + std::to_string(request.tag.iteration);
  return dir / (name + ".txt");
}

class ReplayVlmBackend : public VlmBackend {
 public:
  explicit ReplayVlmBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::string complete(const VlmRequest& request) override {
    const auto path = vlm_fixture_path(dir_, request);
    if (!std::filesystem::exists(path)) throw ConfigError("missing VLM fixture " + path.string());
    return read_text_file(path);
  }

 private:
  std::filesystem::path dir_;
};

class RecordingVlmBackend : public VlmBackend {
 public:
  RecordingVlmBackend(VlmBackend& inner, std::filesystem::path dir) : inner_(inner), dir_(std::move(dir)) {}

  std::string complete(const VlmRequest& request) override {
    std::string reply = inner_.complete(request);
    std::lock_guard lock(mutex_);
    write_text_file(vlm_fixture_path(dir_, request), reply);
    return reply;
  }

 private:
  VlmBackend& inner_;
  std::filesystem::path dir_;
  std::mutex mutex_;
};

struct LiveVlmConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "o3-2025-04-16";
  std::string api_key_env = "VLM_API_KEY";
  RetryPolicy retry;
};

// OpenAI-compatible chat-completions body: optional system message, then one
// user turn holding the text followed by the images as data URLs.
inline nlohmann::json chat_completion_body(const VlmRequest& request, const std::string& model) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system_prompt.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  }
  nlohmann::json content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", request.user_prompt}});
  for (const auto& a : request.attachments) {
    content.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:" + a.media_type + ";base64," + base64_encode(a.data)}}}});
  }
  messages.push_back({{"role", "user"}, {"content", std::move(content)}});
  return {{"model", model}, {"messages", std::move(messages)}};
}

inline std::string chat_completion_text(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed chat-completions response: ") + e.what(), 1);
  }
}

class LiveVlmBackend : public VlmBackend {
 public:
  explicit LiveVlmBackend(LiveVlmConfig config) : config_(std::move(config)) {}

  std::string complete(const VlmRequest& request) override {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) throw ConfigError("environment variable " + config_.api_key_env + " is not set");
    const std::string body = chat_completion_body(request, config_.model).dump();
    std::string reply;
    {
      std::lock_guard lock(mutex_);
      reply = post_json(config_.endpoint, body, {{"Authorization", std::string("Bearer ") + key}}, config_.retry);
    }
    return chat_completion_text(reply);
  }

 private:
  LiveVlmConfig config_;
  std::mutex mutex_;
};

}  // namespace seesay
