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
#include "seesay/metrics.hpp"

namespace seesay {
namespace {

TEST(Confusion, FourPixelHandExample) {
  const BinaryMask pred(4, 1, std::vector<std::uint8_t>{1, 1, 0, 0});
  const BinaryMask truth(4, 1, std::vector<std::uint8_t>{1, 0, 1, 0});
  const auto c = confusion(pred, truth);
  EXPECT_EQ(c.tp, 1);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.fn, 1);
  EXPECT_EQ(c.tn, 1);
  EXPECT_THROW(confusion(pred, BinaryMask(2, 2)), StructuralError);
}

TEST(Confusion, PartitionsPixels) {
  std::mt19937 rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto a = oracle::random_mask(rng, 9, 7, 0.4);
    const auto b = oracle::random_mask(rng, 9, 7, 0.4);
    const auto c = confusion(a, b);
    EXPECT_EQ(c.tp + c.fp + c.tn + c.fn, 63);
    EXPECT_EQ(static_cast<std::size_t>(c.tp + c.fp), popcount(a));
  }
  const auto same = confusion(BinaryMask(3, 1, std::vector<std::uint8_t>{1, 0, 1}),
                              BinaryMask(3, 1, std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(same.tp, 2);
  EXPECT_EQ(same.tn, 1);
}

TEST(PixelMetrics, TableFormulasOnBalancedCounts) {
  const auto m = pixel_metrics({1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(*m.iou, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*m.dice, 0.5);
  EXPECT_DOUBLE_EQ(*m.precision, 0.5);
  EXPECT_DOUBLE_EQ(*m.recall, 0.5);
  EXPECT_DOUBLE_EQ(*m.specificity, 0.5);
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(*m.balanced_accuracy, 0.5);
}

TEST(PixelMetrics, EmptyPositiveClassLeavesRecallUndefined) {
  ConfusionCounts c;
  c.tn = 10;
  const auto m = pixel_metrics(c);
  EXPECT_FALSE(m.recall);
  EXPECT_FALSE(m.iou);
  EXPECT_FALSE(m.precision);
  EXPECT_EQ(*m.specificity, 1.0);
  EXPECT_EQ(*m.accuracy, 1.0);
  EXPECT_FALSE(m.balanced_accuracy);
}

TEST(PixelMetrics, Identities) {
  std::mt19937 rng(2);
  std::uniform_int_distribution<long> n(0, 50);
  for (int i = 0; i < 500; ++i) {
    ConfusionCounts c{n(rng), n(rng), n(rng), n(rng)};
    if (c.tp + c.fp + c.tn + c.fn == 0) continue;
    const auto m = pixel_metrics(c);
    if (m.iou) {
      EXPECT_NEAR(*m.dice, 2 * *m.iou / (1 + *m.iou), 1e-12);
    }
    if (m.balanced_accuracy) {
      EXPECT_EQ(*m.balanced_accuracy, (*m.recall + *m.specificity) / 2.0);
    }
  }
}

TEST(ZoneLabels, BoundaryIsInclusive) {
  const std::vector<ZoneSample> s{{0.95, 0.949, "f", 0}, {0.949, 1.0, "f", 0}, {1.0, 1.0, "f", 0}};
  const auto l = zone_labels(s, 0.95);
  EXPECT_EQ(l[0], (ZoneLabel{1, 0}));
  EXPECT_EQ(l[1], (ZoneLabel{0, 1}));
  EXPECT_EQ(zone_labels(s, 1.0)[2], (ZoneLabel{1, 1}));
  EXPECT_THROW(zone_labels(s, 0.0), ParameterError);
}

TEST(Mae, MeanAbsoluteRatioError) {
  const std::vector<ZoneSample> s{{0.9, 1.0, "f", 0}, {0.5, 0.2, "f", 0}};
  EXPECT_NEAR(*mae(s), 0.2, 1e-15);
  EXPECT_FALSE(mae(std::vector<ZoneSample>{}));
}

TEST(AveragePrecision, HandExample) {
  const std::vector<double> scores{0.9, 0.8, 0.7};
  EXPECT_NEAR(*average_precision(scores, std::vector<int>{1, 0, 1}), 5.0 / 6.0, 1e-12);
  EXPECT_EQ(*average_precision(scores, std::vector<int>{1, 1, 0}), 1.0);
  EXPECT_FALSE(average_precision(scores, std::vector<int>{0, 0, 0}));
}

TEST(AveragePrecision, AppendingLowNegativesChangesNothing) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int k = 0; k < 20; ++k) {
      scores.push_back(u(rng));
      labels.push_back(k % 3 == 0);
    }
    const double before = *average_precision(scores, labels);
    for (int k = 0; k < 5; ++k) {
      scores.push_back(0.1 * k / 5);
      labels.push_back(0);
    }
    EXPECT_EQ(*average_precision(scores, labels), before);
  }
}

TEST(RocAuc, EqualsPairwiseStatisticWithTies) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> coarse(0, 6);
  std::uniform_int_distribution<int> len(2, 60);
  for (int i = 0; i < 100; ++i) {
    const int n = len(rng);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int k = 0; k < n; ++k) {
      scores.push_back(coarse(rng) / 6.0);
      labels.push_back(coarse(rng) % 2);
    }
    labels[0] = 1;
    labels[1] = 0;
    EXPECT_NEAR(*roc_auc(scores, labels), oracle::pairwise_auc(scores, labels), 1e-12);
  }
}

TEST(RocAuc, SingleClassIsUndefined) {
  EXPECT_FALSE(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}));
}

TEST(Curves, RocRunsFromOriginToOneOne) {
  const std::vector<double> s{0.9, 0.9, 0.4, 0.2};
  const std::vector<int> l{1, 0, 1, 0};
  const auto roc = roc_points(s, l);
  ASSERT_EQ(roc.size(), 4u);
  EXPECT_TRUE(std::isinf(roc.front().threshold));
  EXPECT_EQ(roc[1].fpr, 0.5);
  EXPECT_EQ(roc[1].tpr, 0.5);
  EXPECT_EQ(roc.back().fpr, 1.0);
  EXPECT_EQ(roc.back().tpr, 1.0);
  const auto pr = pr_points(s, l);
  ASSERT_EQ(pr.size(), 3u);
  EXPECT_EQ(pr[0].precision, 0.5);
  EXPECT_EQ(pr.back().recall, 1.0);
}

TEST(Aggregate, TwoFrameExample) {
  const auto s = aggregate_stochastic({{0.6, 0.6}, {1.0, 1.0}});
  EXPECT_NEAR(*s.mean, 0.8, 1e-15);
  EXPECT_NEAR(s.stddev, 0.2, 1e-15);
  EXPECT_EQ(s.frames, 2);
}

TEST(Aggregate, UndefinedRunsAndFramesAreExcluded) {
  const auto s = aggregate_stochastic({{0.5, std::nullopt}, {std::nullopt, std::nullopt}, {1.0, 0.0}});
  EXPECT_EQ(*s.mean, 0.5);
  EXPECT_EQ(s.stddev, 0.0);
  EXPECT_EQ(s.frames, 2);
  EXPECT_EQ(s.excluded, 1);
  EXPECT_THROW(aggregate_stochastic({{1.0}, {1.0, 2.0}}), ParameterError);
  EXPECT_FALSE(aggregate_stochastic({{std::nullopt}}).mean);
}

TEST(Aggregate, IdenticalRunsReproduceSingleRun) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<std::optional<double>>> one, five;
  for (int f = 0; f < 7; ++f) {
    const double v = u(rng);
    one.push_back({v});
    five.push_back({v, v, v, v, v});
  }
  const auto a = aggregate_stochastic(one);
  const auto b = aggregate_stochastic(five);
  EXPECT_EQ(*a.mean, *b.mean);
  EXPECT_EQ(a.stddev, b.stddev);
}

TEST(Pooled, AucMatchesRocAucOnPooledVectors) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<ZoneSample> samples;
  for (int f = 0; f < 4; ++f)
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 10; ++k) samples.push_back({u(rng), u(rng), "f" + std::to_string(f), r});
  const auto pooled = pooled_curves(samples, 0.5);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& s : samples) {
    scores.push_back(s.predicted);
    labels.push_back(s.truth >= 0.5);
  }
  EXPECT_NEAR(*pooled.auc, *roc_auc(scores, labels), 1e-12);
  EXPECT_EQ(*pooled.ap, *average_precision(scores, labels));
}

TEST(Pooled, SingleClassPoolIsDiagnosed) {
  const std::vector<ZoneSample> s{{0.9, 1.0, "f", 0}, {0.8, 1.0, "f", 0}};
  const auto p = pooled_curves(s, 0.95);
  EXPECT_FALSE(p.auc);
  EXPECT_FALSE(p.diagnostic.empty());
}

TEST(Sweep, PerfectPredictorScoresOneEverywhere) {
  std::vector<ZoneSample> s;
  for (int f = 0; f < 3; ++f)
    for (double r : {1.0, 0.97, 0.92, 0.87, 0.82, 0.5}) s.push_back({r, r, "f" + std::to_string(f), 0});
  const auto sweep = threshold_sweep(s);
  ASSERT_EQ(sweep.size(), 4u);
  for (const auto& [eta, report] : sweep) {
    EXPECT_EQ(*report.at("AP").mean, 1.0) << eta;
    EXPECT_EQ(*report.at("ROC").mean, 1.0) << eta;
    EXPECT_EQ(*report.at("MAE").mean, 0.0) << eta;
  }
}

TEST(Sweep, MaeDoesNotDependOnEta) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<ZoneSample> s;
  for (int f = 0; f < 3; ++f)
    for (int r = 0; r < 2; ++r)
      for (int k = 0; k < 8; ++k) s.push_back({u(rng), u(rng), std::to_string(f), r});
  const auto sweep = threshold_sweep(s);
  const double first = *sweep.begin()->second.at("MAE").mean;
  for (const auto& [eta, report] : sweep) EXPECT_EQ(*report.at("MAE").mean, first);
  EXPECT_THROW(threshold_sweep(std::vector<ZoneSample>{}), ParameterError);
}

TEST(Kappa, KnownValues) {
  const std::vector<int> a{1, 1, 2, 2};
  const std::vector<int> b{1, 2, 1, 2};
  EXPECT_NEAR(*cohens_kappa(a, b), 0.0, 1e-12);
  EXPECT_EQ(*cohens_kappa(a, a), 1.0);
  const std::vector<int> all3(8, 3);
  EXPECT_EQ(*cohens_kappa(all3, all3), 1.0);
  EXPECT_THROW(cohens_kappa(a, std::vector<int>{1}), ParameterError);
}

TEST(Kappa, Symmetric) {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> rating(1, 4);
  for (int i = 0; i < 100; ++i) {
    std::vector<int> a(12), b(12);
    for (auto& v : a) v = rating(rng);
    for (auto& v : b) v = rating(rng);
    const auto ab = cohens_kappa(a, b);
    const auto ba = cohens_kappa(b, a);
    ASSERT_EQ(ab.has_value(), ba.has_value());
    if (ab) {
      EXPECT_NEAR(*ab, *ba, 1e-15);
    }
  }
}

}  // namespace
}  // namespace seesay
