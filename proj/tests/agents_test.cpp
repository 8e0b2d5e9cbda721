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


#include <gtest/gtest.h>

#include <random>

#include "seesay/agents.hpp"
#include "seesay/vlm_backends.hpp"

namespace seesay {
namespace {

std::vector<RgbImage> five_frames() { return std::vector<RgbImage>(5, RgbImage(8, 6, {10, 20, 30})); }
std::vector<ScalarGrid> five_depths() { return std::vector<ScalarGrid>(5, ScalarGrid(8, 6, 0.5)); }

std::vector<CandidateZone> sample_candidates() {
  return {{0, {100, 100}, 50, 1.0, 7000},
          {1, {500, 400}, 50, 1.0, 7850},
          {2, {900, 100}, 50, 0.97, 7850},
          {3, {450, 380}, 50, 1.0, 7850}};
}

TEST(Agent1Request, MultiFrameCarriesElevenImagesInOrder) {
  const auto frames = five_frames();
  const auto depths = five_depths();
  const auto req = build_agent1_request(frames, depths, frames[4], PromptVocabulary({"person", "car"}),
                                        Agent1Mode::multi_frame, {"batch_001", 0, 0});
  ASSERT_EQ(req.attachments.size(), 11u);
  EXPECT_EQ(req.attachments[0].name, "rgb_0");
  EXPECT_EQ(req.attachments[1].name, "depth_0");
  EXPECT_EQ(req.attachments[9].name, "depth_4");
  EXPECT_EQ(req.attachments[10].name, "overlay");
  EXPECT_NE(req.user_prompt.find(R"(Current DINO-X prompt list: ["person", "car"])"), std::string::npos);
  EXPECT_EQ(req.user_prompt.find("{prompt_list}"), std::string::npos);
}

TEST(Agent1Request, SingleFrameCarriesThreeImages) {
  const auto frames = five_frames();
  const auto depths = five_depths();
  const auto req = build_agent1_request(std::span(frames).last(1), std::span(depths).last(1), frames[4],
                                        PromptVocabulary{}, Agent1Mode::single_frame);
  ASSERT_EQ(req.attachments.size(), 3u);
  EXPECT_EQ(req.attachments[0].name, "rgb");
  EXPECT_EQ(req.attachments[2].name, "overlay");
  EXPECT_NE(req.user_prompt.find("prompt list: []"), std::string::npos);
  EXPECT_NE(req.user_prompt.find("set it to null"), std::string::npos);
}

TEST(Agent1Request, WrongFrameCountIsRejected) {
  const auto frames = five_frames();
  const auto depths = five_depths();
  EXPECT_THROW(build_agent1_request(std::span(frames).first(4), std::span(depths).first(4), frames[0],
                                    PromptVocabulary{}, Agent1Mode::multi_frame),
               ParameterError);
  EXPECT_THROW(build_agent1_request(frames, depths, frames[0], PromptVocabulary{}, Agent1Mode::single_frame),
               ParameterError);
}

TEST(Agent1Reply, ParsesFencedJsonWithProse) {
  const auto v = parse_agent1_response(
      "Here you go:\n```json\n{\"landing_pad_safe\": false, \"reasoning\": \"dog on pad\", "
      "\"future_prediction\": \"stays\", \"updated_prompt_list\": [\"dog\", \"Dog\", \" tree \"]}\n```\nDone.");
  EXPECT_EQ(v.landing_pad_safe, PadSafety::unsafe);
  EXPECT_EQ(v.reasoning, "dog on pad");
  EXPECT_EQ(v.updated_vocabulary.classes(), (std::vector<std::string>{"dog", "tree"}));
}

TEST(Agent1Reply, NullPadSafetyIsUnknown) {
  const auto v = parse_agent1_response(
      R"({"landing_pad_safe": null, "reasoning": "no pad", "future_prediction": null, "updated_prompt_list": []})");
  EXPECT_EQ(v.landing_pad_safe, PadSafety::unknown);
  EXPECT_TRUE(v.updated_vocabulary.empty());
}

TEST(Agent1Reply, MissingOrMistypedKeysAreParseErrors) {
  EXPECT_THROW(parse_agent1_response("no json here"), ParseError);
  EXPECT_THROW(parse_agent1_response(R"({"landing_pad_safe": true, "reasoning": "", "future_prediction": ""})"),
               ParseError);
  EXPECT_THROW(parse_agent1_response(
                   R"({"landing_pad_safe": "yes", "reasoning": "", "future_prediction": "", "updated_prompt_list": []})"),
               ParseError);
  EXPECT_THROW(parse_agent1_response(
                   R"({"landing_pad_safe": true, "reasoning": "", "future_prediction": "", "updated_prompt_list": [3]})"),
               ParseError);
}

TEST(Agent1Reply, RoundTripsThroughJson) {
  AgentVerdict v;
  v.landing_pad_safe = PadSafety::safe;
  v.reasoning = "clear";
  v.future_prediction = "clear";
  v.updated_vocabulary = PromptVocabulary({"person"});
  const auto back = parse_agent1_response(verdict_to_json(v).dump());
  EXPECT_EQ(back.landing_pad_safe, PadSafety::safe);
  EXPECT_EQ(back.updated_vocabulary.classes(), v.updated_vocabulary.classes());
}

TEST(Refinement, FailureOrEmptyListKeepsPriorVocabulary) {
  const PromptVocabulary prior({"person", "car"});
  auto failing = ScriptedVlmBackend::failing();
  const auto out = run_agent1(failing, VlmRequest{}, prior);
  EXPECT_FALSE(out.verdict);
  EXPECT_FALSE(out.error.empty());
  EXPECT_EQ(out.vocabulary.classes(), prior.classes());

  ScriptedVlmBackend garbage([](const VlmRequest&) { return std::string("I cannot help"); });
  EXPECT_EQ(run_agent1(garbage, VlmRequest{}, prior).vocabulary.classes(), prior.classes());

  ScriptedVlmBackend empty_list([](const VlmRequest&) {
    return std::string(
        R"({"landing_pad_safe": true, "reasoning": "", "future_prediction": "", "updated_prompt_list": []})");
  });
  const auto kept = run_agent1(empty_list, VlmRequest{}, prior);
  EXPECT_TRUE(kept.verdict);
  EXPECT_EQ(kept.vocabulary.classes(), prior.classes());

  ScriptedVlmBackend replaced([](const VlmRequest&) {
    return std::string(
        R"({"landing_pad_safe": false, "reasoning": "", "future_prediction": "", "updated_prompt_list": ["dog"]})");
  });
  EXPECT_EQ(run_agent1(replaced, VlmRequest{}, prior).vocabulary.classes(), std::vector<std::string>{"dog"});
}

TEST(Agent2Request, SixImagesAndNormalizedCandidates) {
  const auto frames = std::vector<RgbImage>(5, RgbImage(1000, 800));
  const std::vector<CandidateZone> c{{0, {500, 400}, 100, 0.98765, 31000}};
  const auto req = build_agent2_request(c, "near {the} tree", frames, RgbImage(1000, 800), 3);
  EXPECT_EQ(req.attachments.size(), 6u);
  EXPECT_EQ(req.attachments.back().name, "annotated_overlay");
  EXPECT_NE(req.user_prompt.find("\"cx_norm\": 0.5,"), std::string::npos);
  EXPECT_NE(req.user_prompt.find("\"r_norm_h\": 0.125,"), std::string::npos);
  EXPECT_NE(req.user_prompt.find("\"safe_ratio\": 0.9877"), std::string::npos);
  EXPECT_NE(req.user_prompt.find("User preference: near {the} tree\n"), std::string::npos);
  EXPECT_NE(req.user_prompt.find("Select top 3 indices"), std::string::npos);
}

TEST(Agent2Request, Preconditions) {
  const auto frames = std::vector<RgbImage>(5, RgbImage(10, 10));
  EXPECT_THROW(build_agent2_request({}, "", frames, RgbImage(10, 10), 3), ParameterError);
  const auto c = sample_candidates();
  EXPECT_THROW(build_agent2_request(c, "", frames, RgbImage(10, 10), 3, 2), ParameterError);
  EXPECT_THROW(build_agent2_request(c, "", std::span(frames).first(3), RgbImage(10, 10), 3), ParameterError);
}

TEST(Agent2Reply, KeepsKnownDistinctEntriesUpToTopN) {
  const auto c = sample_candidates();
  const auto r = parse_agent2_response(
      R"({"ranked": [{"index": 9}, {"index": 2, "reason": "r2"}, {"index": 2}, {"index": "1"}, {"index": 0}, {"index": 3}]})",
      c, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0], (RankedZone{2, "r2"}));
  EXPECT_EQ(r[1].index, 0);
  EXPECT_TRUE(parse_agent2_response("nonsense", c, 3).empty());
  EXPECT_TRUE(parse_agent2_response(R"({"ranking": []})", c, 3).empty());
}

TEST(Heuristic, SafeRatioThenAreaThenCentreDistance) {
  EXPECT_EQ(heuristic_rank(sample_candidates(), 1000, 800), (std::vector<int>{1, 3, 0, 2}));
}

TEST(RankZones, OutageFallsBackToHeuristic) {
  auto failing = ScriptedVlmBackend::failing();
  const auto frames = std::vector<RgbImage>(5, RgbImage(1000, 800));
  const auto r = rank_zones(failing, sample_candidates(), "", frames, RgbImage(1000, 800), 3);
  EXPECT_EQ(r.source, RankingSource::heuristic);
  ASSERT_EQ(r.ranked.size(), 3u);
  EXPECT_EQ(r.ranked[0], (RankedZone{1, kHeuristicReason}));
  EXPECT_EQ(r.ranked[2].index, 0);
  EXPECT_FALSE(r.error.empty());
}

TEST(RankZones, PartialReplyIsToppedUp) {
  ScriptedVlmBackend partial([](const VlmRequest&) { return std::string(R"({"ranked": [{"index": 2}]})"); });
  const auto frames = std::vector<RgbImage>(5, RgbImage(1000, 800));
  const auto r = rank_zones(partial, sample_candidates(), "", frames, RgbImage(1000, 800), 3);
  EXPECT_EQ(r.source, RankingSource::vlm_with_heuristic_fill);
  std::vector<int> got;
  for (const auto& z : r.ranked) got.push_back(z.index);
  EXPECT_EQ(got, (std::vector<int>{2, 1, 3}));
}

TEST(RankZones, FewerCandidatesThanTopN) {
  ScriptedVlmBackend full([](const VlmRequest&) { return std::string(R"({"ranked": [{"index": 0}]})"); });
  const auto frames = std::vector<RgbImage>(5, RgbImage(10, 10));
  const std::vector<CandidateZone> one{{0, {5, 5}, 5, 1.0, 80}};
  const auto r = rank_zones(full, one, "", frames, RgbImage(10, 10), 3);
  EXPECT_EQ(r.source, RankingSource::vlm);
  EXPECT_EQ(r.ranked.size(), 1u);
}

TEST(SuccessRate, FrameThenDatasetAveraging) {
  EXPECT_DOUBLE_EQ(pad_safety_success_rate({{1, 1, 1, 1, 1}, {1, 1, 1, 0, 0}}), 0.8);
  EXPECT_DOUBLE_EQ(pad_safety_success_rate({{1}, {0, 0, 0, 1}}), 0.625);
  EXPECT_THROW(pad_safety_success_rate({}), ParameterError);
  EXPECT_THROW(pad_safety_success_rate({{2}}), ParameterError);
}

TEST(Payload, ListsAttachmentsWithDigests) {
  VlmRequest req;
  req.mode = "ranking";
  req.user_prompt = "u";
  req.attachments.push_back({"a", "image/png", {'a', 'b', 'c'}});
  const auto j = nlohmann::json::parse(request_payload(req));
  EXPECT_EQ(j["attachments"][0]["bytes"], 3);
  EXPECT_EQ(j["attachments"][0]["sha256"], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace seesay
