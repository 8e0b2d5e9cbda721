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

// The two VLM agents. Agent 1 judges the primary landing pad and rewrites the
// detector vocabulary; Agent 2 ranks candidate zones against a user
// preference. Request construction, reply parsing and the heuristic fallback
// live here; transports live in vlm_backends.hpp.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "seesay/grid.hpp"
#include "seesay/image.hpp"
#include "seesay/semantic.hpp"
#include "seesay/zones.hpp"

namespace seesay {

enum class AgentRole { agent1, agent2 };

inline std::string to_string(AgentRole role) {
  return role == AgentRole::agent1 ? "agent1" : "agent2";
}

struct VlmAttachment {
  std::string name;
  std::string media_type = "image/png";
  Bytes data;
};

// Identifies a request for fixture lookup: which batch, which stochastic run.
struct RequestTag {
  std::string batch_id;
  int run = 0;
  int iteration = 0;  // Agent 1 refinement round
};

struct VlmRequest {
  AgentRole agent = AgentRole::agent1;
  RequestTag tag;
  std::string mode;           // "multi-frame", "single-frame" or "ranking"
  std::string system_prompt;  // empty: single user turn
  std::string user_prompt;
  std::vector<VlmAttachment> attachments;
};

// Canonical description of a request: prompts verbatim, attachments by name,
// size and SHA-256. Byte-identical for identical inputs.
inline std::string request_payload(const VlmRequest& request) {
  nlohmann::ordered_json attachments = nlohmann::ordered_json::array();
  for (const auto& a : request.attachments) {
    attachments.push_back({{"name", a.name},
                           {"media_type", a.media_type},
                           {"bytes", a.data.size()},
                           {"sha256", sha256_hex(a.data)}});
  }
  nlohmann::ordered_json j = {{"agent", to_string(request.agent)},
                              {"mode", request.mode},
                              {"system", request.system_prompt},
                              {"user", request.user_prompt},
                              {"attachments", std::move(attachments)}};
  return j.dump(2) + "\n";
}

// Chat-style model endpoint. complete() returns the raw reply text or throws
// (TransportError, ConfigError); it never truncates silently. Implementations
// must be shareable across threads.
class VlmBackend {
 public:
  virtual ~VlmBackend() = default;
  virtual std::string complete(const VlmRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Agent 1

enum class PadSafety { safe, unsafe, unknown };

inline std::string to_string(PadSafety s) {
  switch (s) {
    case PadSafety::safe: return "safe";
    case PadSafety::unsafe: return "unsafe";
    case PadSafety::unknown: return "unknown";
  }
  return "unknown";
}

struct AgentVerdict {
  PadSafety landing_pad_safe = PadSafety::unknown;
  std::string reasoning;
  std::string future_prediction;
  PromptVocabulary updated_vocabulary;

  friend bool operator==(const AgentVerdict&, const AgentVerdict&) = default;
};

enum class Agent1Mode { multi_frame, single_frame };

inline constexpr std::string_view kAgent1MultiFrameTemplate =
    "You are analyzing a package delivery drone drop safety using 5 consecutive RGB frames, "
    "their depth maps, and a gradient-based safety overlay (green = safe, red = unsafe) for the "
    "last frame.\n"
    "\n"
    "Current DINO-X prompt list: {prompt_list}\n"
    "\n"
    "Tasks:\n"
    "1. Determine if the landing pad is safe for the current frame (true/false). Decide based on "
    "the final frame and the previous 5 frames: if there are objects on the landing pad, or there "
    "will be objects on the landing pad, declare unsafe, otherwise declare safe.\n"
    "2. Provide reasoning using temporal cues and depth information.\n"
    "3. Predict future safety (will conditions remain safe/unsafe?).\n"
    "4. Provide a single updated prompt list: include ALL unsafe objects/surfaces; remove safe "
    "ones (e.g. landing pad if confirmed safe, bushes, ...). The list must reflect the most recent "
    "scene. Unsafe objects include any moving or static objects that are not flat, or are moving "
    "and not safe for a package drop. If the drop zone with H sign is unsafe, also add it to the "
    "updated list. Provide the most complete prompt list for the unsafe zones. Avoid ambiguous "
    "prompts. Rule: streets and rooftops are always unsafe; bushes and grass are safe as long as "
    "they are free of objects and flat. Each entity must be specific and detectable, e.g. person, "
    "black asphalt road, white soccer ball, tree, white stairs, brown rooftop, ... For people, "
    "avoid additional details. For roads, stairs, decks, and ambiguous objects, specify the "
    "object. Include your reasoning for each hazardous prompt in the reasoning field.\n"
    "\n"
    "Output strictly in JSON with keys: landing_pad_safe, reasoning (includes reasoning for "
    "choosing unsafe objects), future_prediction, updated_prompt_list (only text prompts such as "
    "rooftop, street road, person, landing pad with H).\n";

inline constexpr std::string_view kAgent1SingleFrameTemplate =
    "You are evaluating package drop safety for a drone.\n"
    "\n"
    "Inputs:\n"
    "- ONE RGB frame (the final frame)\n"
    "- Its depth map\n"
    "- A safety overlay for the same frame (green = safe, red = unsafe)\n"
    "\n"
    "Current DINO-X prompt list: {prompt_list}\n"
    "\n"
    "Task (STRICT RULES):\n"
    "1. Determine whether the primary landing pad with an 'H' marking is safe for a drop. Set "
    "landing_pad_safe = false only if you can see any object(s) inside the landing pad area. "
    "Otherwise, set landing_pad_safe = true. If you cannot locate the landing pad, set it to null "
    "and explain.\n"
    "2. reasoning: 1-3 short sentences describing what you see on the pad.\n"
    "3. future_prediction: one sentence (may be empty).\n"
    "4. updated_prompt_list: if safe, return only clearly unsafe objects in this frame; if "
    "unsafe, also include landing pad with H. Keep prompts concrete and detectable.\n"
    "\n"
    "Output STRICT JSON with keys: landing_pad_safe, reasoning, future_prediction, "
    "updated_prompt_list.\n";

inline std::string replace_all(std::string text, std::string_view key, std::string_view value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos;
       pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

// ["person", "black asphalt road"]; "[]" when empty.
inline std::string render_prompt_list(const PromptVocabulary& vocabulary) {
  std::string out = "[";
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    if (i) out += ", ";
    out += nlohmann::json(vocabulary.classes()[i]).dump();
  }
  return out + "]";
}

// Multi-frame: `frames` and `depths` hold the five batch frames in order and
// attachments are (rgb, depth) x 5 followed by the overlay (11 images).
// Single-frame: exactly one frame and one depth map (the decision frame);
// attachments are rgb, depth, overlay.
inline VlmRequest build_agent1_request(std::span<const RgbImage> frames,
                                       std::span<const ScalarGrid> depths,
                                       const RgbImage& overlay, const PromptVocabulary& vocabulary,
                                       Agent1Mode mode, RequestTag tag = {}) {
  const std::size_t expected = mode == Agent1Mode::multi_frame ? 5 : 1;
  if (frames.size() != expected || depths.size() != expected) {
    throw ParameterError("agent1: " + std::string(mode == Agent1Mode::multi_frame ? "multi" : "single") +
                         "-frame mode needs " + std::to_string(expected) + " frame(s) and depth map(s), got " +
                         std::to_string(frames.size()) + " and " + std::to_string(depths.size()));
  }
  VlmRequest request;
  request.agent = AgentRole::agent1;
  request.tag = std::move(tag);
  request.mode = mode == Agent1Mode::multi_frame ? "multi-frame" : "single-frame";
  const auto& templ =
      mode == Agent1Mode::multi_frame ? kAgent1MultiFrameTemplate : kAgent1SingleFrameTemplate;
  request.user_prompt = replace_all(std::string(templ), "{prompt_list}", render_prompt_list(vocabulary));
  for (std::size_t i = 0; i < expected; ++i) {
    const std::string suffix = expected == 1 ? "" : "_" + std::to_string(i);
    request.attachments.push_back({"rgb" + suffix, "image/png", encode_png(frames[i])});
    request.attachments.push_back({"depth" + suffix, "image/png", encode_unit_grid_png(depths[i])});
  }
  request.attachments.push_back({"overlay", "image/png", encode_png(overlay)});
  return request;
}

// Removes one layer of ``` fences and any prose around the outermost JSON
// value. Returns the candidate JSON text.
inline std::string extract_json_text(std::string_view text) {
  std::string body(text);
  if (const auto open = body.find("```"); open != std::string::npos) {
    const auto line_end = body.find('\n', open);
    const auto content = line_end == std::string::npos ? open + 3 : line_end + 1;
    const auto close = body.find("```", content);
    body = body.substr(content, close == std::string::npos ? std::string::npos : close - content);
  }
  const auto first = body.find_first_of("{[");
  const auto last = body.find_last_of("}]");
  if (first == std::string::npos || last == std::string::npos || last < first) return trim(body);
  return body.substr(first, last - first + 1);
}

inline AgentVerdict parse_agent1_response(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(extract_json_text(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("agent1: reply is not JSON: ") + e.what(), text);
  }
  if (!j.is_object()) throw ParseError("agent1: reply is not a JSON object", text);
  for (const char* key : {"landing_pad_safe", "reasoning", "future_prediction", "updated_prompt_list"}) {
    if (!j.contains(key)) throw ParseError(std::string("agent1: missing key '") + key + "'", text);
  }
  AgentVerdict verdict;
  const auto& safe = j["landing_pad_safe"];
  if (safe.is_boolean()) {
    verdict.landing_pad_safe = safe.get<bool>() ? PadSafety::safe : PadSafety::unsafe;
  } else if (safe.is_null()) {
    verdict.landing_pad_safe = PadSafety::unknown;
  } else {
    throw ParseError("agent1: landing_pad_safe must be true, false or null", text);
  }
  auto text_field = [&](const char* key) -> std::string {
    const auto& v = j[key];
    if (v.is_null()) return {};
    if (!v.is_string()) throw ParseError(std::string("agent1: '") + key + "' must be a string", text);
    return v.get<std::string>();
  };
  verdict.reasoning = text_field("reasoning");
  verdict.future_prediction = text_field("future_prediction");
  const auto& list = j["updated_prompt_list"];
  if (!list.is_array()) throw ParseError("agent1: updated_prompt_list must be an array", text);
  std::vector<std::string> classes;
  for (const auto& item : list) {
    if (!item.is_string()) throw ParseError("agent1: updated_prompt_list entries must be strings", text);
    classes.push_back(item.get<std::string>());
  }
  verdict.updated_vocabulary = PromptVocabulary(classes);
  return verdict;
}

inline nlohmann::ordered_json verdict_to_json(const AgentVerdict& verdict) {
  nlohmann::ordered_json safe = nullptr;
  if (verdict.landing_pad_safe != PadSafety::unknown) {
    safe = verdict.landing_pad_safe == PadSafety::safe;
  }
  return {{"landing_pad_safe", safe},
          {"reasoning", verdict.reasoning},
          {"future_prediction", verdict.future_prediction},
          {"updated_prompt_list", verdict.updated_vocabulary.classes()}};
}

// Next vocabulary: the agent's list when one was parsed and it is non-empty,
// otherwise the prior list.
inline PromptVocabulary refine_vocabulary(const PromptVocabulary& prior,
                                          const std::optional<AgentVerdict>& verdict) {
  if (!verdict || verdict->updated_vocabulary.empty()) return prior;
  return verdict->updated_vocabulary;
}

struct Agent1Outcome {
  std::optional<AgentVerdict> verdict;  // absent when the call or parse failed
  PromptVocabulary vocabulary;          // vocabulary for the next detection pass
  std::string raw_reply;
  std::string error;
};

// One refinement step. Transport and parse failures are reported in the
// outcome and leave the prior vocabulary in place.
inline Agent1Outcome run_agent1(VlmBackend& backend, const VlmRequest& request,
                                const PromptVocabulary& prior) {
  Agent1Outcome outcome;
  try {
    outcome.raw_reply = backend.complete(request);
    outcome.verdict = parse_agent1_response(outcome.raw_reply);
  } catch (const Error& e) {
    outcome.error = e.what();
  }
  outcome.vocabulary = refine_vocabulary(prior, outcome.verdict);
  return outcome;
}

// ---------------------------------------------------------------------------
// Agent 2

inline constexpr std::string_view kAgent2SystemPrompt =
    "You are selecting circular landing zones for a drone from indexed candidates. PRIORITIZE "
    "user's preference over safe ratio where they conflict.\n"
    "Return STRICT JSON ONLY:\n"
    "{\n"
    "  \"ranked\": [\n"
    "    {\n"
    "      \"index\": <int>,\n"
    "      \"reason\": \"<1-2 sentences>\"\n"
    "    },\n"
    "    ...  // up to N entries\n"
    "  ]\n"
    "}\n";

inline constexpr std::string_view kAgent2UserTemplate =
    "User preference: {user_pref_text}\n"
    "\n"
    "Select top {top_n} indices by preference (ties broken by higher safe_ratio). Return STRICT "
    "JSON ONLY.\n"
    "\n"
    "Candidates (normalized coordinates and safe ratios):\n"
    "{candidates_json}\n";

inline double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

// Candidate list in normalized image coordinates, values rounded to 4
// decimals.
inline std::string candidates_json(std::span<const CandidateZone> candidates, int width, int height) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& c : candidates) {
    list.push_back({{"index", c.index},
                    {"cx_norm", round4(c.center.x / width)},
                    {"cy_norm", round4(c.center.y / height)},
                    {"r_norm_w", round4(c.radius / width)},
                    {"r_norm_h", round4(c.radius / height)},
                    {"safe_ratio", round4(c.safe_ratio)}});
  }
  return list.dump(2);
}

struct RankedZone {
  int index = 0;
  std::string reason;
  friend bool operator==(const RankedZone&, const RankedZone&) = default;
};

// `frames` are the five batch frames; the annotated overlay makes six
// attachments. Callers with no candidates take the no-candidate path instead.
inline VlmRequest build_agent2_request(std::span<const CandidateZone> candidates,
                                       const std::string& preference,
                                       std::span<const RgbImage> frames,
                                       const RgbImage& annotated_overlay, int top_n,
                                       int top_k = 30, RequestTag tag = {}) {
  if (candidates.empty()) throw ParameterError("agent2: no candidates to rank");
  if (candidates.size() > static_cast<std::size_t>(top_k)) {
    throw ParameterError("agent2: more than top_k candidates");
  }
  if (frames.size() != 5) {
    throw ParameterError("agent2: needs 5 frames plus the overlay, got " + std::to_string(frames.size()) +
                         " frames");
  }
  if (top_n < 1) throw ParameterError("agent2: top_n must be >= 1");
  VlmRequest request;
  request.agent = AgentRole::agent2;
  request.tag = std::move(tag);
  request.mode = "ranking";
  request.system_prompt = std::string(kAgent2SystemPrompt);
  std::string user = std::string(kAgent2UserTemplate);
  user = replace_all(user, "{candidates_json}",
                     candidates_json(candidates, annotated_overlay.width(), annotated_overlay.height()));
  user = replace_all(user, "{top_n}", std::to_string(top_n));
  // Substituted last so preference text containing braces stays verbatim.
  user = replace_all(user, "{user_pref_text}", preference);
  request.user_prompt = std::move(user);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    request.attachments.push_back({"rgb_" + std::to_string(i), "image/png", encode_png(frames[i])});
  }
  request.attachments.push_back({"annotated_overlay", "image/png", encode_png(annotated_overlay)});
  return request;
}

// Valid entries in reply order: known candidate index, first occurrence
// only, at most top_n. Anything unparseable yields an empty list.
inline std::vector<RankedZone> parse_agent2_response(const std::string& text,
                                                     std::span<const CandidateZone> candidates,
                                                     int top_n) {
  std::vector<RankedZone> out;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(extract_json_text(text));
  } catch (const nlohmann::json::exception&) {
    return out;
  }
  if (!j.is_object() || !j.contains("ranked") || !j["ranked"].is_array()) return out;
  for (const auto& entry : j["ranked"]) {
    if (static_cast<int>(out.size()) >= top_n) break;
    if (!entry.is_object() || !entry.contains("index") || !entry["index"].is_number_integer()) continue;
    const int index = entry["index"].get<int>();
    const bool known = std::any_of(candidates.begin(), candidates.end(),
                                   [&](const CandidateZone& c) { return c.index == index; });
    const bool repeated = std::any_of(out.begin(), out.end(),
                                      [&](const RankedZone& r) { return r.index == index; });
    if (!known || repeated) continue;
    std::string reason;
    if (entry.contains("reason") && entry["reason"].is_string()) reason = entry["reason"].get<std::string>();
    out.push_back({index, std::move(reason)});
  }
  return out;
}

// Candidate indices ordered by safe ratio desc, area desc, distance to the
// image centre asc, index asc.
inline std::vector<int> heuristic_rank(std::span<const CandidateZone> candidates, int width, int height) {
  std::vector<CandidateZone> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end(), CandidateOrder{image_center(width, height)});
  std::vector<int> order;
  order.reserve(sorted.size());
  for (const auto& c : sorted) order.push_back(c.index);
  return order;
}

enum class RankingSource { vlm, vlm_with_heuristic_fill, heuristic };

inline std::string to_string(RankingSource s) {
  switch (s) {
    case RankingSource::vlm: return "vlm";
    case RankingSource::vlm_with_heuristic_fill: return "vlm+heuristic";
    case RankingSource::heuristic: return "heuristic";
  }
  return "unknown";
}

struct RankingResult {
  std::vector<RankedZone> ranked;
  RankingSource source = RankingSource::heuristic;
  std::string raw_reply;
  std::string error;
};

inline constexpr const char* kHeuristicReason = "heuristic fallback";

// Asks Agent 2 for a ranking and tops it up from heuristic_rank until
// min(top_n, |candidates|) distinct entries exist. A failing backend gives a
// purely heuristic result.
inline RankingResult rank_zones(VlmBackend& backend, std::span<const CandidateZone> candidates,
                                const std::string& preference, std::span<const RgbImage> frames,
                                const RgbImage& annotated_overlay, int top_n, int top_k = 30,
                                RequestTag tag = {}) {
  if (candidates.empty()) throw ParameterError("rank_zones: no candidates");
  RankingResult result;
  try {
    const VlmRequest request =
        build_agent2_request(candidates, preference, frames, annotated_overlay, top_n, top_k, tag);
    result.raw_reply = backend.complete(request);
    result.ranked = parse_agent2_response(result.raw_reply, candidates, top_n);
  } catch (const TransportError& e) {
    result.error = e.what();
  } catch (const ConfigError& e) {
    result.error = e.what();
  }
  const std::size_t wanted = std::min<std::size_t>(static_cast<std::size_t>(top_n), candidates.size());
  const std::size_t from_vlm = result.ranked.size();
  for (int index : heuristic_rank(candidates, annotated_overlay.width(), annotated_overlay.height())) {
    if (result.ranked.size() >= wanted) break;
    const bool taken = std::any_of(result.ranked.begin(), result.ranked.end(),
                                   [&](const RankedZone& r) { return r.index == index; });
    if (!taken) result.ranked.push_back({index, kHeuristicReason});
  }
  if (from_vlm == 0) {
    result.source = RankingSource::heuristic;
  } else if (result.ranked.size() > from_vlm) {
    result.source = RankingSource::vlm_with_heuristic_fill;
  } else {
    result.source = RankingSource::vlm;
  }
  return result;
}

// Mean over frames of each frame's mean run score (1 correct, 0 wrong).
inline double pad_safety_success_rate(const std::vector<std::vector<int>>& runs_per_frame) {
  if (runs_per_frame.empty()) throw ParameterError("success rate: no frames");
  double total = 0.0;
  for (const auto& runs : runs_per_frame) {
    if (runs.empty()) throw ParameterError("success rate: frame without runs");
    double sum = 0.0;
    for (int r : runs) {
      if (r != 0 && r != 1) throw ParameterError("success rate: run scores must be 0 or 1");
      sum += r;
    }
    total += sum / static_cast<double>(runs.size());
  }
  return total / static_cast<double>(runs_per_frame.size());
}

}  // namespace seesay
