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

// Alternative drop-zone candidates: circles on a hexagonal lattice, scored by
// the fraction of safe pixels they cover.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <optional>
#include <vector>

#include "seesay/fusion.hpp"
#include "seesay/grid.hpp"
#include "seesay/image.hpp"
#include "seesay/imgcore.hpp"

namespace seesay {

struct CandidateZone {
  int index = 0;
  PixelPoint center;
  double radius = 0.0;
  double safe_ratio = 0.0;
  long area = 0;  // pixels of the disk that fall inside the image

  friend bool operator==(const CandidateZone&, const CandidateZone&) = default;
};

struct ZoneParams {
  double default_radius = 100.0;
  double eta = 0.95;
  int top_k = 30;
  int top_n = 3;

  void validate() const {
    if (!(default_radius > 0.0)) throw ParameterError("zones: default_radius must be > 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("zones: eta must lie in [0,1]");
    if (top_k < 1 || top_n < 1) throw ParameterError("zones: top_k and top_n must be >= 1");
    if (top_n > top_k) throw ParameterError("zones: top_n must not exceed top_k");
  }
};

// Reference point for the "closest to centre" ordering and for normalized
// coordinates.
inline PixelPoint image_center(int width, int height) {
  return {width / 2.0, height / 2.0};
}

inline bool disk_touches_image(PixelPoint center, double radius, int width, int height) {
  bool any = false;
  for_each_disk_pixel(center, radius, width, height, [&](int, int) { any = true; });
  return any;
}

// Row-major hexagonal lattice: column pitch 2r, row pitch sqrt(3) r, first
// centre at (r, r), odd rows shifted right by r. Disks may be clipped by the
// border; centres whose disk misses the image entirely are dropped. Images
// smaller than 2r along both axes get one centre at the image centre.
inline std::vector<PixelPoint> hex_centers(int width, int height, double radius) {
  if (!(radius > 0.0)) throw ParameterError("hex_centers: radius must be > 0");
  if (width < 1 || height < 1) throw ParameterError("hex_centers: empty image");
  if (width < 2.0 * radius && height < 2.0 * radius) return {image_center(width, height)};

  const double row_pitch = std::sqrt(3.0) * radius;
  const double col_pitch = 2.0 * radius;
  std::vector<PixelPoint> centers;
  for (int row = 0;; ++row) {
    const double y = radius + row * row_pitch;
    if (y - radius > height - 1) break;
    const double offset = (row % 2 == 1) ? radius : 0.0;
    for (int col = 0;; ++col) {
      const double x = radius + offset + col * col_pitch;
      if (x - radius > width - 1) break;
      if (disk_touches_image({x, y}, radius, width, height)) centers.push_back({x, y});
    }
  }
  // Thin strips with a fractional radius can miss every pixel row.
  if (centers.empty()) centers.push_back(image_center(width, height));
  return centers;
}

// Radius of the circle circumscribing the landing-pad box: half its diagonal.
inline double radius_from_hpad(double box_width, double box_height) {
  if (!(box_width > 0.0) || !(box_height > 0.0)) {
    throw ParameterError("radius_from_hpad: box sides must be > 0");
  }
  return 0.5 * std::sqrt(box_width * box_width + box_height * box_height);
}

struct DiskTally {
  long support = 0;
  long unsafe = 0;
};

inline DiskTally tally_disk(PixelPoint center, double radius, const BinaryMask& unsafe) {
  DiskTally t;
  for_each_disk_pixel(center, radius, unsafe.width(), unsafe.height(), [&](int x, int y) {
    ++t.support;
    t.unsafe += unsafe(x, y);
  });
  return t;
}

// 1 - (unsafe pixels in disk) / (disk pixels inside image).
inline double safe_ratio(PixelPoint center, double radius, const BinaryMask& unsafe) {
  if (!(radius > 0.0)) throw ParameterError("safe_ratio: radius must be > 0");
  const DiskTally t = tally_disk(center, radius, unsafe);
  if (t.support == 0) throw ParameterError("safe_ratio: disk does not intersect the image");
  return 1.0 - static_cast<double>(t.unsafe) / static_cast<double>(t.support);
}

// Strict weak order shared by candidate sorting and the ranking fallback:
// safe ratio desc, area desc, distance to image centre asc, index asc.
struct CandidateOrder {
  PixelPoint reference;

  bool operator()(const CandidateZone& a, const CandidateZone& b) const {
    if (a.safe_ratio != b.safe_ratio) return a.safe_ratio > b.safe_ratio;
    if (a.area != b.area) return a.area > b.area;
    const double da = std::hypot(a.center.x - reference.x, a.center.y - reference.y);
    const double db = std::hypot(b.center.x - reference.x, b.center.y - reference.y);
    if (da != db) return da < db;
    return a.index < b.index;
  }
};

// Every lattice disk with its score, in lattice order (indices 0..n-1),
// before feasibility filtering.
inline std::vector<CandidateZone> score_lattice(const BinaryMask& unsafe, double radius) {
  std::vector<CandidateZone> out;
  int index = 0;
  for (const PixelPoint& c : hex_centers(unsafe.width(), unsafe.height(), radius)) {
    const DiskTally t = tally_disk(c, radius, unsafe);
    out.push_back({index++, c, radius,
                   1.0 - static_cast<double>(t.unsafe) / static_cast<double>(t.support), t.support});
  }
  return out;
}

inline double candidate_radius(const ZoneParams& params, const std::optional<BoundingBox>& hpad) {
  return hpad ? radius_from_hpad(hpad->width, hpad->height) : params.default_radius;
}

// Lattice -> score -> keep safe_ratio >= eta -> sort -> top_k. Indices are
// renumbered 0..k-1 in sorted order. An empty result is a normal outcome.
inline std::vector<CandidateZone> generate_candidates(const SafetyMap& map, const ZoneParams& params,
                                                      const std::optional<BoundingBox>& hpad) {
  params.validate();
  const double radius = candidate_radius(params, hpad);
  std::vector<CandidateZone> feasible;
  for (const auto& c : score_lattice(map.unsafe, radius)) {
    if (c.safe_ratio >= params.eta) feasible.push_back(c);
  }
  std::sort(feasible.begin(), feasible.end(),
            CandidateOrder{image_center(map.unsafe.width(), map.unsafe.height())});
  if (feasible.size() > static_cast<std::size_t>(params.top_k)) feasible.resize(params.top_k);
  for (std::size_t i = 0; i < feasible.size(); ++i) feasible[i].index = static_cast<int>(i);
  return feasible;
}

inline constexpr const char* kNoCandidateOverlayName = "no_candidate_overlay.png";

// Writes the decision-frame overlay as no_candidate_overlay.png into
// `batch_dir`; overwrites any previous copy. Returns the written path.
inline std::filesystem::path no_candidate_artifact(const SafetyMap& map, const RgbImage& frame,
                                                   const std::filesystem::path& batch_dir) {
  const auto path = batch_dir / kNoCandidateOverlayName;
  write_file(path, encode_png(render_overlay(frame, map)));
  return path;
}

}  // namespace seesay
