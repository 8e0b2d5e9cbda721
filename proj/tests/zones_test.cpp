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

#include <limits>

#include <random>

#include "oracles.hpp"
#include "seesay/zones.hpp"

namespace seesay {
namespace {

TEST(HexLattice, PitchAndOddRowOffset) {
  const double r = 10.0;
  const auto c = hex_centers(100, 80, r);
  ASSERT_GE(c.size(), 6u);
  EXPECT_EQ(c[0].x, r);
  EXPECT_EQ(c[0].y, r);
  EXPECT_NEAR(c[1].x - c[0].x, 2 * r, 1e-9);
  const auto second_row = std::find_if(c.begin(), c.end(), [&](const PixelPoint& p) { return p.y > r; });
  ASSERT_NE(second_row, c.end());
  EXPECT_NEAR(second_row->y - r, std::sqrt(3.0) * r, 1e-9);
  EXPECT_NEAR(second_row->x, 2 * r, 1e-9);
}

TEST(HexLattice, CoversImageAndEveryDiskTouchesIt) {
  const int w = 97, h = 61;
  const double r = 7.5;
  const auto centers = hex_centers(w, h, r);
  for (const auto& p : centers) EXPECT_TRUE(disk_touches_image(p, r, w, h));
  auto nearest = [&](int x, int y) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : centers) best = std::min(best, std::hypot(x - p.x, y - p.y));
    return best;
  };
  // Interior pixels fall inside a hexagonal cell of circumradius 2r/sqrt(3);
  // the ragged left edge of odd rows is at most 2r from a center.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool interior = x >= 2 * r && x <= w - 1 - 2 * r && y >= r && y <= h - 1 - 2 * r;
      const double bound = interior ? 2.0 * r / std::sqrt(3.0) : 2.0 * r;
      ASSERT_LE(nearest(x, y), bound + 1e-9) << x << "," << y;
    }
}

TEST(HexLattice, SmallImageGetsSingleCentralCandidate) {
  const auto c = hex_centers(50, 40, 100.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (PixelPoint{25.0, 20.0}));
}

TEST(HexLattice, RejectsBadRadius) { EXPECT_THROW(hex_centers(10, 10, 0.0), ParameterError); }

TEST(Radius, HalfDiagonalOfPadBox) {
  EXPECT_EQ(radius_from_hpad(60, 80), 50.0);
  EXPECT_EQ(radius_from_hpad(6, 8), 5.0);
  EXPECT_THROW(radius_from_hpad(0, 8), ParameterError);
  ZoneParams p;
  EXPECT_EQ(candidate_radius(p, std::nullopt), 100.0);
  EXPECT_EQ(candidate_radius(p, BoundingBox{3, 4, 60, 80}), 50.0);
}

TEST(SafeRatio, MatchesPerPixelScan) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> dim(8, 64);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const int w = dim(rng), h = dim(rng);
    const BinaryMask m = oracle::random_mask(rng, w, h, u(rng));
    const PixelPoint c{u(rng) * w, u(rng) * h};
    const double r = 1.0 + u(rng) * 20.0;
    EXPECT_NEAR(safe_ratio(c, r, m), oracle::safe_ratio(oracle::to_bits(m), c.x, c.y, r), 1e-12);
  }
}

TEST(SafeRatio, ClippedDiskUsesOnlyInImagePixels) {
  BinaryMask m(10, 10, 0);
  m(0, 0) = 1;
  const DiskTally t = tally_disk({0, 0}, 1.0, m);
  EXPECT_EQ(t.support, 3);  // (0,0), (1,0), (0,1)
  EXPECT_DOUBLE_EQ(safe_ratio({0, 0}, 1.0, m), 2.0 / 3.0);
  EXPECT_THROW(safe_ratio({-50, -50}, 1.0, m), ParameterError);
}

TEST(Candidates, SortedFilteredTruncatedAndReindexed) {
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    const BinaryMask unsafe = oracle::random_mask(rng, 120, 90, 0.02 * i);
    ZoneParams p;
    p.default_radius = 8.0;
    p.eta = 0.7;
    p.top_k = 12;
    const SafetyMap map{unsafe, Provenance::refined};
    const auto out = generate_candidates(map, p, std::nullopt);
    EXPECT_LE(out.size(), 12u);
    const CandidateOrder order{image_center(120, 90)};
    for (std::size_t k = 0; k < out.size(); ++k) {
      EXPECT_EQ(out[k].index, static_cast<int>(k));
      EXPECT_GE(out[k].safe_ratio, 0.7);
      if (k > 0) {
        EXPECT_FALSE(order(out[k], out[k - 1]));
      }
    }
    // Nothing feasible was left out while a worse one got in.
    const auto lattice = score_lattice(unsafe, 8.0);
    const long feasible = std::count_if(lattice.begin(), lattice.end(), [](const CandidateZone& c) {
      return c.safe_ratio >= 0.7;
    });
    EXPECT_EQ(static_cast<long>(out.size()), std::min<long>(feasible, 12));
  }
}

TEST(Candidates, TiesBreakByAreaThenCentreDistance) {
  const PixelPoint centre{50, 50};
  CandidateZone a{0, {10, 10}, 5, 1.0, 80};
  CandidateZone b{1, {48, 50}, 5, 1.0, 80};
  CandidateZone c{2, {90, 90}, 5, 1.0, 81};
  std::vector<CandidateZone> v{a, b, c};
  std::sort(v.begin(), v.end(), CandidateOrder{centre});
  EXPECT_EQ(v[0].index, 2);
  EXPECT_EQ(v[1].index, 1);
  EXPECT_EQ(v[2].index, 0);
}

TEST(Candidates, AllUnsafeGivesNoneAndArtifactIsWritten) {
  const SafetyMap map{BinaryMask(64, 48, 1), Provenance::refined};
  ZoneParams p;
  p.default_radius = 10;
  EXPECT_TRUE(generate_candidates(map, p, std::nullopt).empty());
  const auto dir = oracle::fresh_dir("no_candidate");
  const auto path = no_candidate_artifact(map, RgbImage(64, 48), dir);
  EXPECT_EQ(path.filename(), "no_candidate_overlay.png");
  EXPECT_TRUE(std::filesystem::exists(path));
}

TEST(Candidates, EtaBoundaryIsInclusive) {
  // Disk of radius 2 at (2,2) holds 13 pixels; one unsafe gives 12/13.
  BinaryMask m(5, 5, 0);
  m(2, 2) = 1;
  ZoneParams p;
  p.default_radius = 2.0;
  p.eta = 12.0 / 13.0;
  auto has_origin_disk = [&](double eta) {
    p.eta = eta;
    const auto out = generate_candidates({m, Provenance::initial}, p, std::nullopt);
    return std::any_of(out.begin(), out.end(), [](const CandidateZone& c) {
      return c.center == PixelPoint{2, 2};
    });
  };
  EXPECT_TRUE(has_origin_disk(12.0 / 13.0));
  EXPECT_FALSE(has_origin_disk(std::nextafter(12.0 / 13.0, 1.0)));
}

TEST(Candidates, EtaZeroKeepsWholeLatticeUpToTopK) {
  const BinaryMask unsafe(100, 60, 1);
  ZoneParams p;
  p.default_radius = 10;
  p.eta = 0.0;
  p.top_k = 1000;
  EXPECT_EQ(generate_candidates({unsafe, Provenance::initial}, p, std::nullopt).size(),
            hex_centers(100, 60, 10).size());
  p.top_k = 4;
  EXPECT_EQ(generate_candidates({unsafe, Provenance::initial}, p, std::nullopt).size(), 4u);
}

TEST(Candidates, FeasibleSetShrinksAsEtaRises) {
  std::mt19937 rng(23);
  const BinaryMask unsafe = oracle::random_mask(rng, 80, 80, 0.1);
  ZoneParams p;
  p.default_radius = 6;
  p.top_k = 1000;
  p.top_n = 1;
  std::vector<PixelPoint> previous;
  for (double eta : {0.0, 0.8, 0.85, 0.9, 0.95, 1.0}) {
    p.eta = eta;
    std::vector<PixelPoint> centres;
    for (const auto& c : generate_candidates({unsafe, Provenance::initial}, p, std::nullopt)) {
      centres.push_back(c.center);
    }
    if (eta > 0.0) {
      for (const auto& c : centres) {
        EXPECT_NE(std::find(previous.begin(), previous.end(), c), previous.end());
      }
    }
    previous = centres;
  }
}

TEST(Candidates, OrderIgnoresInputPermutation) {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CandidateZone> v;
  for (int i = 0; i < 40; ++i) {
    v.push_back({i, {std::floor(u(rng) * 10), std::floor(u(rng) * 10)}, 3.0, std::round(u(rng) * 4) / 4,
                 static_cast<long>(u(rng) * 3)});
  }
  const CandidateOrder order{{5, 5}};
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end(), order);
  for (int trial = 0; trial < 5; ++trial) {
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::sort(shuffled.begin(), shuffled.end(), order);
    EXPECT_EQ(shuffled, sorted);
  }
}

TEST(HexLattice, CentresArePacked) {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> dim(20, 400);
  std::uniform_real_distribution<double> rad(2.0, 60.0);
  for (int i = 0; i < 20; ++i) {
    const double r = rad(rng);
    const auto c = hex_centers(dim(rng), dim(rng), r);
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        ASSERT_GE(std::hypot(c[a].x - c[b].x, c[a].y - c[b].y), 2 * r - 1e-6 * r);
  }
}

TEST(Radius, GrowsWithEitherSide) {
  EXPECT_LT(radius_from_hpad(10, 20), radius_from_hpad(11, 20));
  EXPECT_LT(radius_from_hpad(10, 20), radius_from_hpad(10, 21));
  EXPECT_NEAR(radius_from_hpad(100, 100), 50.0 * std::sqrt(2.0), 1e-12);
}

TEST(ZoneParams, Validation) {
  ZoneParams p;
  p.top_n = 31;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.eta = 1.01;
  EXPECT_THROW(p.validate(), ParameterError);
}

}  // namespace
}  // namespace seesay
