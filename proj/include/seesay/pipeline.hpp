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

// Batch orchestration: geometry for all five frames, detection on the
// decision frame, Agent 1 refinement, re-detection, fusion, candidate zones
// and Agent 2 ranking, with every artifact written under out/<batch_id>/.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "seesay/agents.hpp"
#include "seesay/config.hpp"
#include "seesay/dataset.hpp"
#include "seesay/detection_backends.hpp"
#include "seesay/draw.hpp"
#include "seesay/flatness.hpp"
#include "seesay/fusion.hpp"
#include "seesay/image.hpp"
#include "seesay/semantic.hpp"
#include "seesay/vlm_backends.hpp"
#include "seesay/zones.hpp"

namespace seesay {

using Logger = std::function<void(const std::string&)>;

inline Logger stderr_logger() {
  return [](const std::string& message) {
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::cerr << message << "\n";
  };
}

struct Backends {
  DetectionBackend& detection;
  VlmBackend& vlm;
};

// Owns the backend objects selected by a config.
class BackendSet {
 public:
  DetectionBackend& detection() { return *detection_; }
  VlmBackend& vlm() { return *vlm_; }
  Backends view() { return {*detection_, *vlm_}; }

  // stub: scripted from the stub scene file; replay: fixture directory;
  // live: HTTP clients. With `record_to`, live answers are also written as
  // replay fixtures.
  static BackendSet create(const RunConfig& config, const std::filesystem::path& dataset_root,
                           const std::optional<std::filesystem::path>& record_to = std::nullopt) {
    BackendSet set;
    switch (config.backend) {
      case BackendKind::stub: {
        const auto scene_path = config.stub_scene.value_or(dataset_root / "stub_scene.json");
        nlohmann::json scene = nlohmann::json::object();
        if (std::filesystem::exists(scene_path)) {
          scene = nlohmann::json::parse(read_text_file(scene_path));
        } else if (config.stub_scene) {
          throw ConfigError("stub scene not found: " + scene_path.string());
        }
        set.detection_ = std::make_unique<StubDetectionBackend>(
            stub_scene_from_json(scene.value("detection", nlohmann::json::object())));
        set.vlm_ = std::make_unique<ScriptedVlmBackend>(
            scripted_responder_from_json(scene.value("vlm", nlohmann::json::object())));
        break;
      }
      case BackendKind::replay:
        if (!std::filesystem::is_directory(config.fixtures_dir)) {
          throw ConfigError("fixture directory not found: " + config.fixtures_dir.string());
        }
        set.detection_ = std::make_unique<ReplayDetectionBackend>(config.fixtures_dir);
        set.vlm_ = std::make_unique<ReplayVlmBackend>(config.fixtures_dir);
        break;
      case BackendKind::live:
        set.detection_ = std::make_unique<LiveDetectionBackend>(config.live_detection);
        set.vlm_ = std::make_unique<LiveVlmBackend>(config.live_vlm);
        break;
    }
    if (record_to) {
      set.inner_detection_ = std::move(set.detection_);
      set.inner_vlm_ = std::move(set.vlm_);
      set.detection_ = std::make_unique<RecordingDetectionBackend>(*set.inner_detection_, *record_to);
      set.vlm_ = std::make_unique<RecordingVlmBackend>(*set.inner_vlm_, *record_to);
    }
    return set;
  }

 private:
  std::unique_ptr<DetectionBackend> inner_detection_;
  std::unique_ptr<VlmBackend> inner_vlm_;
  std::unique_ptr<DetectionBackend> detection_;
  std::unique_ptr<VlmBackend> vlm_;
};

struct BatchResult {
  std::string batch_id;
  int run = 0;
  std::string decision_frame_id;
  std::filesystem::path output_dir;

  PromptVocabulary initial_vocabulary;
  PromptVocabulary refined_vocabulary;
  Agent1Outcome agent1;
  PadSafety pad_safety = PadSafety::unknown;

  BinaryMask flat_mask{1, 1};
  SafetyMap initial_map{BinaryMask(1, 1), Provenance::initial};
  SafetyMap final_map{BinaryMask(1, 1), Provenance::refined};

  std::optional<BoundingBox> hpad;
  double radius = 0.0;
  std::vector<CandidateZone> lattice;
  std::vector<CandidateZone> candidates;
  RankingResult ranking;
  bool no_candidates = false;

  std::map<std::string, double> timings_ms;
};

inline constexpr Rgb kCandidateColor{255, 255, 255};
inline constexpr Rgb kRankColor{255, 230, 0};
inline constexpr Rgb kLabelColor{0, 0, 0};

// Digit scale and stroke width that keep a label inside a circle of `radius`.
inline int label_scale(double radius) { return std::clamp(static_cast<int>(radius / 5.0), 1, 3); }
inline double stroke_width(double radius) { return std::clamp(radius / 8.0, 1.0, 3.0); }

// Final overlay with every candidate circle and its index (Agent 2 input).
inline RgbImage annotate_candidates(const RgbImage& overlay, std::span<const CandidateZone> candidates) {
  RgbImage out = overlay;
  for (const auto& c : candidates) {
    draw_circle(out, c.center, c.radius, kCandidateColor, std::min(2.0, stroke_width(c.radius)));
    draw_label(out, c.center, c.index, kLabelColor, std::min(2, label_scale(c.radius)));
  }
  return out;
}

// Final overlay with the ranked circles numbered 1..n in rank order.
inline RgbImage annotate_ranking(const RgbImage& overlay, std::span<const CandidateZone> candidates,
                                 std::span<const RankedZone> ranked) {
  RgbImage out = overlay;
  for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
    for (const auto& c : candidates) {
      if (c.index != ranked[rank].index) continue;
      draw_circle(out, c.center, c.radius, kRankColor, stroke_width(c.radius));
      draw_label(out, c.center, static_cast<int>(rank + 1), kRankColor, label_scale(c.radius));
    }
  }
  return out;
}

inline nlohmann::ordered_json candidate_to_json(const CandidateZone& c) {
  return {{"index", c.index}, {"cx", c.center.x},       {"cy", c.center.y},
          {"radius", c.radius}, {"safe_ratio", c.safe_ratio}, {"area", c.area}};
}

inline CandidateZone candidate_from_json(const nlohmann::json& j) {
  CandidateZone c;
  c.index = j.at("index").get<int>();
  c.center = {j.at("cx").get<double>(), j.at("cy").get<double>()};
  c.radius = j.at("radius").get<double>();
  c.safe_ratio = j.at("safe_ratio").get<double>();
  c.area = j.at("area").get<long>();
  return c;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}
  template <typename F>
  auto operator()(const std::string& stage, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      std::map<std::string, double>& sink;
      std::string stage;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        sink[stage] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
    } record{sink_, stage, start};
    return f();
  }

 private:
  std::map<std::string, double>& sink_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace detail

// Runs the full pipeline for one batch and writes its artifacts into
// `batch_dir`, replacing whatever was there. On failure a manifest with the
// error is still written and the exception is rethrown.
inline BatchResult run_batch(const FrameBatch& batch, const RunConfig& config, Backends backends,
                             const std::filesystem::path& batch_dir, int run = 0,
                             const Logger& log = stderr_logger()) {
  namespace fs = std::filesystem;
  BatchResult result;
  result.batch_id = batch.batch_id;
  result.run = run;
  result.decision_frame_id = batch.decision_frame().frame_id;
  result.output_dir = batch_dir;
  const std::string started = utc_timestamp();
  detail::StageTimer timed(result.timings_ms);
  const std::string& frame_id = result.decision_frame_id;

  auto write_manifest = [&](const std::string& status, const std::string& error) {
    nlohmann::ordered_json frames = nlohmann::ordered_json::array();
    for (const auto& f : batch.frames) frames.push_back(f.frame_id);
    nlohmann::ordered_json timings = nlohmann::ordered_json::object();
    for (const auto& [k, v] : result.timings_ms) timings[k] = v;
    detail::write_json(batch_dir / "manifest.json",
                       {{"batch_id", batch.batch_id},
                        {"run", run},
                        {"status", status},
                        {"error", error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(error)},
                        {"started_at", started},
                        {"finished_at", utc_timestamp()},
                        {"frames", frames},
                        {"decision_frame", frame_id},
                        {"config", config_to_json(config)},
                        {"timings_ms", timings}});
  };

  fs::remove_all(batch_dir);
  fs::create_directories(batch_dir);
  try {
    config.validate();

    // Inputs.
    std::vector<RgbImage> frames;
    std::vector<ScalarGrid> raw_depths;
    timed("load", [&] {
      for (const auto& rec : batch.frames) {
        frames.push_back(load_rgb_png(rec.rgb_path));
        raw_depths.push_back(load_depth(rec.depth_path));
        require_same_shape(frames.back(), raw_depths.back(), ("frame " + rec.frame_id).c_str());
      }
    });
    const RgbImage& decision = frames[kDecisionIndex];
    const FrameView view{frame_id, decision};

    // Geometry for every frame of the window, in parallel.
    std::vector<ScalarGrid> depths;
    std::vector<BinaryMask> flats;
    timed("flatness", [&] {
      std::vector<std::future<std::pair<ScalarGrid, BinaryMask>>> jobs;
      for (const auto& d : raw_depths) {
        jobs.push_back(std::async(std::launch::async, [&config, &d] {
          NormalizedDepth nd = normalize_depth(d, config.flatness.epsilon);
          BinaryMask flat = flatness_mask(nd, config.flatness);
          return std::make_pair(nd.grid(), std::move(flat));
        }));
      }
      for (auto& job : jobs) {
        auto [depth, flat] = job.get();
        depths.push_back(std::move(depth));
        flats.push_back(std::move(flat));
      }
    });
    result.flat_mask = flats[kDecisionIndex];
    const BinaryMask geometric_unsafe = gradient_unsafe(result.flat_mask);

    // Initial semantic pass and overlay.
    result.initial_vocabulary = config.initial_vocabulary;
    PromptVocabulary vocabulary = config.initial_vocabulary;
    BinaryMask semantic = timed("detect", [&] {
      return detect_and_binarize(backends.detection, view, vocabulary, config.theta_d);
    });
    result.initial_map = fuse(semantic, geometric_unsafe, Provenance::initial);
    const RgbImage initial_overlay = render_overlay(decision, result.initial_map);

    // Agent 1 refinement rounds, each followed by re-detection.
    SafetyMap current = result.initial_map;
    RgbImage current_overlay = initial_overlay;
    for (int iteration = 0; iteration < config.refinement_iterations; ++iteration) {
      const RequestTag tag{batch.batch_id, run, iteration};
      const VlmRequest request =
          config.agent1_mode == Agent1Mode::multi_frame
              ? build_agent1_request(frames, depths, current_overlay, vocabulary, Agent1Mode::multi_frame, tag)
              : build_agent1_request(std::span(frames).last(1), std::span(depths).last(1), current_overlay,
                                     vocabulary, Agent1Mode::single_frame, tag);
      result.agent1 = timed("agent1", [&] { return run_agent1(backends.vlm, request, vocabulary); });
      if (!result.agent1.error.empty()) {
        log(batch.batch_id + ": agent 1 failed, keeping prior vocabulary: " + result.agent1.error);
      } else if (result.agent1.verdict->landing_pad_safe == PadSafety::unknown &&
                 config.agent1_mode == Agent1Mode::multi_frame) {
        log(batch.batch_id + ": agent 1 returned null pad safety in multi-frame mode; recorded as unknown");
      }
      vocabulary = result.agent1.vocabulary;
      semantic = timed("detect", [&] {
        return detect_and_binarize(backends.detection, view, vocabulary, config.theta_d);
      });
      current = fuse(semantic, geometric_unsafe, Provenance::refined);
      current_overlay = render_overlay(decision, current);
    }
    result.refined_vocabulary = vocabulary;
    result.pad_safety = result.agent1.verdict ? result.agent1.verdict->landing_pad_safe : PadSafety::unknown;
    result.final_map = current;

    // Candidate zones.
    result.hpad = timed("hpad", [&] { return backends.detection.locate_hpad(view); });
    result.radius = candidate_radius(config.zones, result.hpad);
    timed("zones", [&] {
      result.lattice = score_lattice(result.final_map.unsafe, result.radius);
      result.candidates = generate_candidates(result.final_map, config.zones, result.hpad);
    });

    if (result.candidates.empty()) {
      result.no_candidates = true;
      no_candidate_artifact(result.final_map, decision, batch_dir);
    } else {
      const RgbImage annotated = annotate_candidates(current_overlay, result.candidates);
      result.ranking = timed("agent2", [&] {
        return rank_zones(backends.vlm, result.candidates, config.preference_for(batch.batch_id), frames,
                          annotated, config.zones.top_n, config.zones.top_k, RequestTag{batch.batch_id, run, 0});
      });
      if (!result.ranking.error.empty()) {
        log(batch.batch_id + ": agent 2 unavailable, heuristic ranking used: " + result.ranking.error);
      }
      write_file(batch_dir / "ranked_on_overlay.png",
                 encode_png(annotate_ranking(current_overlay, result.candidates, result.ranking.ranked)));
    }

    // Artifacts.
    write_file(batch_dir / "overlay_initial.png", encode_png(initial_overlay));
    write_file(batch_dir / "overlay_final.png", encode_png(current_overlay));
    write_file(batch_dir / "flat_mask.png", encode_mask_png(result.flat_mask));
    write_file(batch_dir / "semantic_mask.png", encode_mask_png(semantic));
    write_file(batch_dir / "final_mask.png", encode_mask_png(result.final_map.unsafe));

    nlohmann::ordered_json verdict_json = nullptr;
    if (result.agent1.verdict) verdict_json = verdict_to_json(*result.agent1.verdict);
    detail::write_json(batch_dir / "verdict.json",
                       {{"batch_id", batch.batch_id},
                        {"decision_frame", frame_id},
                        {"mode", config.agent1_mode == Agent1Mode::multi_frame ? "multi-frame" : "single-frame"},
                        {"pad_safety", to_string(result.pad_safety)},
                        {"verdict", verdict_json},
                        {"initial_vocabulary", result.initial_vocabulary.classes()},
                        {"refined_vocabulary", result.refined_vocabulary.classes()},
                        {"agent1_error", result.agent1.error.empty() ? nlohmann::ordered_json(nullptr)
                                                                     : nlohmann::ordered_json(result.agent1.error)},
                        {"raw_reply", result.agent1.raw_reply}});

    write_text_file(batch_dir / ("candidates_" + frame_id + ".json"),
                    candidates_json(result.candidates, decision.width(), decision.height()) + "\n");

    nlohmann::ordered_json lattice = nlohmann::ordered_json::array();
    for (const auto& c : result.lattice) lattice.push_back(candidate_to_json(c));
    detail::write_json(batch_dir / ("lattice_" + frame_id + ".json"),
                       {{"frame_id", frame_id},
                        {"width", decision.width()},
                        {"height", decision.height()},
                        {"radius", result.radius},
                        {"hpad", result.hpad ? nlohmann::ordered_json(box_to_json(*result.hpad)) : nullptr},
                        {"zones", lattice}});

    nlohmann::ordered_json ranked = nlohmann::ordered_json::array();
    for (const auto& r : result.ranking.ranked) {
      nlohmann::ordered_json entry = {{"index", r.index}, {"reason", r.reason}};
      for (const auto& c : result.candidates) {
        if (c.index == r.index) entry["zone"] = candidate_to_json(c);
      }
      ranked.push_back(std::move(entry));
    }
    detail::write_json(batch_dir / "ranking.json",
                       {{"no_candidates", result.no_candidates},
                        {"source", result.no_candidates ? "none" : to_string(result.ranking.source)},
                        {"preference", config.preference_for(batch.batch_id)},
                        {"ranked", ranked},
                        {"error", result.ranking.error.empty() ? nlohmann::ordered_json(nullptr)
                                                               : nlohmann::ordered_json(result.ranking.error)}});
  } catch (const std::exception& e) {
    write_manifest("error", e.what());
    throw;
  }
  write_manifest("ok", "");
  return result;
}

// Directory for one (run, batch): out/<batch> for single-run configs,
// out/run_<k>/<batch> otherwise.
inline std::filesystem::path batch_output_dir(const RunConfig& config, const std::string& batch_id, int run) {
  if (config.runs == 1) return config.output_dir / batch_id;
  return config.output_dir / ("run_" + std::to_string(run)) / batch_id;
}

struct RunSummary {
  int completed = 0;
  std::vector<std::string> failures;  // "<batch> run <k>: <error>"
};

// All batches x runs, up to config.workers at a time.
inline RunSummary run_all(const std::vector<FrameBatch>& batches, const RunConfig& config, Backends backends,
                          const Logger& log = stderr_logger()) {
  struct Job {
    const FrameBatch* batch;
    int run;
  };
  std::vector<Job> jobs;
  for (int run = 0; run < config.runs; ++run) {
    for (const auto& b : batches) jobs.push_back({&b, run});
  }
  RunSummary summary;
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      try {
        run_batch(*job.batch, config, backends, batch_output_dir(config, job.batch->batch_id, job.run), job.run,
                  log);
        std::lock_guard lock(mutex);
        ++summary.completed;
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        summary.failures.push_back(job.batch->batch_id + " run " + std::to_string(job.run) + ": " + e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::max(1, std::min<int>(config.workers, static_cast<int>(jobs.size())));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  std::sort(summary.failures.begin(), summary.failures.end());
  return summary;
}

}  // namespace seesay
