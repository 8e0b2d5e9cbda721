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

#include "oracles.hpp"
#include "seesay/semantic.hpp"

namespace seesay {
namespace {

TEST(Vocabulary, TrimsDropsEmptyAndDedupesCaseInsensitively) {
  const PromptVocabulary v({" Person", "car", "", "  ", "PERSON", "Car ", "tree"});
  EXPECT_EQ(v.classes(), (std::vector<std::string>{"Person", "car", "tree"}));
  EXPECT_TRUE(v.contains("person"));
  EXPECT_FALSE(v.contains("bus"));
}

TEST(Vocabulary, DefaultIsTheTenVisDroneClasses) {
  const auto v = PromptVocabulary::visdrone10();
  EXPECT_EQ(v.size(), 10u);
  for (const char* c : {"person", "pedestrian", "people", "bicycle", "car", "van", "truck", "awning-tricycle",
                        "bus", "motor"}) {
    EXPECT_TRUE(v.contains(c)) << c;
  }
}

TEST(Vocabulary, HashIgnoresOrderAndCase) {
  EXPECT_EQ(PromptVocabulary({"a", "B"}).hash(), PromptVocabulary({"b", "A"}).hash());
  EXPECT_NE(PromptVocabulary({"a"}).hash(), PromptVocabulary({"a", "b"}).hash());
  EXPECT_EQ(PromptVocabulary({"a"}).hash().size(), 16u);
  // First 16 hex digits of sha256("a\n").
  EXPECT_EQ(PromptVocabulary({"A"}).hash(), "87428fc522803d31");
}

TEST(ClassMasks, ValidatesShapeAndRange) {
  ClassMaskSet set(3, 2);
  EXPECT_THROW(set.add("x", ScalarGrid(2, 2)), StructuralError);
  EXPECT_THROW(set.add("x", ScalarGrid(3, 2, 1.5)), ParameterError);
  set.add("Car", ScalarGrid(3, 2, 0.5));
  ASSERT_NE(set.find("car"), nullptr);
}

TEST(Aggregate, IsPerPixelMaximum) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ClassMaskSet set(4, 3);
  std::vector<ScalarGrid> grids;
  for (int c = 0; c < 3; ++c) {
    ScalarGrid g(4, 3);
    for (double& v : g.values()) v = u(rng);
    grids.push_back(g);
    set.add("c" + std::to_string(c), g);
  }
  const ScalarGrid agg = aggregate_unsafe(set);
  for (std::size_t i = 0; i < agg.size(); ++i) {
    EXPECT_EQ(agg.values()[i],
              std::max({grids[0].values()[i], grids[1].values()[i], grids[2].values()[i]}));
  }
}

TEST(Aggregate, EmptySetIsAllSafe) {
  const ScalarGrid agg = aggregate_unsafe(ClassMaskSet(2, 2));
  for (double v : agg.values()) EXPECT_EQ(v, 0.0);
}

TEST(Binarize, ThresholdIsInclusive) {
  const ScalarGrid g(4, 1, std::vector<double>{0.49, 0.5, 0.51, 0.0});
  EXPECT_EQ(binarize(g, 0.5), BinaryMask(4, 1, std::vector<std::uint8_t>{0, 1, 1, 0}));
  EXPECT_EQ(popcount(binarize(g, 0.0)), 4u);
  EXPECT_THROW(binarize(g, 1.2), ParameterError);
}

TEST(Binarize, MonotoneInThreshold) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarGrid g(10, 10);
  for (double& v : g.values()) v = u(rng);
  std::size_t prev = g.size();
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const std::size_t n = popcount(binarize(g, t));
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(Rle, ValueRunsRoundTrip) {
  const std::vector<double> v{0, 0, 0.5, 0.5, 0.5, 1, 0};
  const auto runs = run_length_encode<double>(v);
  EXPECT_EQ(runs.size(), 4u);
  EXPECT_EQ(run_length_decode(runs, v.size()), v);
  EXPECT_THROW(run_length_decode(runs, v.size() + 1), ParseError);
  EXPECT_THROW(run_length_decode(runs, v.size() - 1), ParseError);
}

TEST(Rle, BinaryRunsStartWithZeros) {
  const BinaryMask m(5, 1, std::vector<std::uint8_t>{1, 1, 0, 1, 1});
  EXPECT_EQ(binary_rle_encode(m), (std::vector<std::size_t>{0, 2, 1, 2}));
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    const BinaryMask r = oracle::random_mask(rng, 7, 5, 0.4);
    EXPECT_EQ(binary_rle_decode(binary_rle_encode(r), 7, 5), r);
  }
  EXPECT_THROW(binary_rle_decode({1, 2}, 2, 2), ParseError);
}

}  // namespace
}  // namespace seesay
