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

// Evaluation: pixel confusion metrics for safety maps, drop-zone MAE / AP /
// ROC-AUC, run-then-frame aggregation, pooled curves and Cohen's kappa.
//
// Metrics that are undefined for an input (zero denominator, a single class)
// are std::nullopt and are skipped by the aggregators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "seesay/grid.hpp"

namespace seesay {

// Unsafe (bit 1) is the positive class.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& truth) {
  require_same_shape(pred, truth, "confusion");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.values()[i];
    const bool t = truth.values()[i];
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

struct PixelMetrics {
  std::optional<double> iou;
  std::optional<double> dice;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> specificity;
  std::optional<double> accuracy;
  std::optional<double> balanced_accuracy;
};

inline std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

inline PixelMetrics pixel_metrics(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0) throw ParameterError("pixel_metrics: negative count");
  if (c.total() == 0) throw ParameterError("pixel_metrics: no pixels");
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn);
  const double fn = static_cast<double>(c.fn);
  PixelMetrics m;
  m.iou = ratio(tp, tp + fp + fn);
  m.dice = ratio(2.0 * tp, 2.0 * tp + fp + fn);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.specificity = ratio(tn, tn + fp);
  m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  if (m.recall && m.specificity) m.balanced_accuracy = (*m.recall + *m.specificity) / 2.0;
  return m;
}

// One candidate zone: predicted and ground-truth safe ratio.
struct ZoneSample {
  double predicted = 0.0;
  double truth = 0.0;
  std::string frame_id;
  int run = 0;
};

struct ZoneLabel {
  int predicted = 0;
  int truth = 0;
  friend bool operator==(const ZoneLabel&, const ZoneLabel&) = default;
};

inline void check_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in (0,1]");
}

// A zone is labelled safe (1) when its ratio reaches eta.
inline std::vector<ZoneLabel> zone_labels(std::span<const ZoneSample> samples, double eta) {
  check_eta(eta);
  std::vector<ZoneLabel> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({s.predicted >= eta ? 1 : 0, s.truth >= eta ? 1 : 0});
  return out;
}

inline std::optional<double> mae(std::span<const ZoneSample> samples) {
  if (samples.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& s : samples) sum += std::abs(s.predicted - s.truth);
  return sum / static_cast<double>(samples.size());
}

inline void check_scores_labels(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ParameterError("scores and labels differ in length");
  for (int l : labels) {
    if (l != 0 && l != 1) throw ParameterError("labels must be 0 or 1");
  }
}

// Indices sorted by score descending; equal scores keep input order.
inline std::vector<std::size_t> rank_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

// Step-integrated area under the precision-recall curve: mean of the
// precision measured at the rank of each positive.
inline std::optional<double> average_precision(std::span<const double> scores, std::span<const int> labels) {
  check_scores_labels(scores, labels);
  const long positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0) return std::nullopt;
  double sum = 0.0;
  long hits = 0;
  long rank = 0;
  for (std::size_t i : rank_by_score(scores)) {
    ++rank;
    if (labels[i] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(positives);
}

struct RocPoint {
  double threshold;  // +inf for the origin point
  double fpr;
  double tpr;
};

struct PrPoint {
  double threshold;
  double recall;
  double precision;
};

// ROC points: the origin, then one point per distinct score (descending),
// where all samples scoring >= threshold are called positive.
inline std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const int> labels) {
  check_scores_labels(scores, labels);
  const long positives = std::count(labels.begin(), labels.end(), 1);
  const long negatives = static_cast<long>(labels.size()) - positives;
  if (positives == 0 || negatives == 0) return {};
  const auto order = rank_by_score(scores);
  std::vector<RocPoint> points{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  long tp = 0;
  long fp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    (labels[i] == 1 ? tp : fp) += 1;
    if (k + 1 < order.size() && scores[order[k + 1]] == scores[i]) continue;
    points.push_back({scores[i], static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives});
  }
  return points;
}

inline std::vector<PrPoint> pr_points(std::span<const double> scores, std::span<const int> labels) {
  check_scores_labels(scores, labels);
  const long positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0) return {};
  const auto order = rank_by_score(scores);
  std::vector<PrPoint> points;
  long tp = 0;
  long called = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    ++called;
    tp += labels[i];
    if (k + 1 < order.size() && scores[order[k + 1]] == scores[i]) continue;
    points.push_back({scores[i], static_cast<double>(tp) / positives, static_cast<double>(tp) / called});
  }
  return points;
}

// Trapezoidal area under a ROC polyline.
inline double area_under(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    area += (points[k].fpr - points[k - 1].fpr) * (points[k].tpr + points[k - 1].tpr) / 2.0;
  }
  return area;
}

// Trapezoidal ROC area over all score thresholds; tied scores get half
// credit, which equals P(s+ > s-) + P(s+ == s-)/2.
inline std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels) {
  const auto points = roc_points(scores, labels);
  if (points.empty()) return std::nullopt;
  return area_under(points);
}

struct MetricSummary {
  std::optional<double> mean;
  double stddev = 0.0;  // population standard deviation across frames
  int frames = 0;       // frames that contributed
  int excluded = 0;     // frames with no defined run
};

// Ordered metric name -> summary.
using MetricReport = std::map<std::string, MetricSummary>;

// values[frame][run]. Each frame's value is the mean of its defined runs;
// the summary is mean and population std over frames that have one.
inline MetricSummary aggregate_stochastic(const std::vector<std::vector<std::optional<double>>>& values) {
  MetricSummary out;
  if (values.empty()) return out;
  const std::size_t runs = values.front().size();
  std::vector<double> frame_means;
  for (const auto& frame : values) {
    if (frame.size() != runs) throw ParameterError("aggregate_stochastic: frames have different run counts");
    double sum = 0.0;
    int defined = 0;
    for (const auto& v : frame) {
      if (!v) continue;
      sum += *v;
      ++defined;
    }
    if (defined == 0) {
      ++out.excluded;
      continue;
    }
    frame_means.push_back(sum / defined);
  }
  out.frames = static_cast<int>(frame_means.size());
  if (frame_means.empty()) return out;
  const double mean = std::accumulate(frame_means.begin(), frame_means.end(), 0.0) / frame_means.size();
  double sq = 0.0;
  for (double v : frame_means) sq += (v - mean) * (v - mean);
  out.mean = mean;
  out.stddev = std::sqrt(sq / frame_means.size());
  return out;
}

struct PooledCurves {
  std::vector<RocPoint> roc;
  std::vector<PrPoint> pr;
  std::optional<double> auc;
  std::optional<double> ap;
  std::string diagnostic;  // set when the pool lacks a class
};

// One ROC and one PR curve over every sample of every frame and run, scored
// by predicted ratio against ground-truth labels at eta.
inline PooledCurves pooled_curves(std::span<const ZoneSample> samples, double eta) {
  check_eta(eta);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& s : samples) {
    scores.push_back(s.predicted);
    labels.push_back(s.truth >= eta ? 1 : 0);
  }
  PooledCurves out;
  const long positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    out.diagnostic = samples.empty() ? "no samples" : (positives == 0 ? "pool has no safe zones" : "pool has no unsafe zones");
    return out;
  }
  out.roc = roc_points(scores, labels);
  out.pr = pr_points(scores, labels);
  out.auc = area_under(out.roc);
  out.ap = average_precision(scores, labels);
  return out;
}

// Unweighted Cohen's kappa over categorical ratings. When both raters use a
// single shared category, observed and chance agreement are both 1; that case
// is reported as 1.0 (complete agreement).
inline std::optional<double> cohens_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ParameterError("cohens_kappa: rating lists differ in length");
  if (a.empty()) throw ParameterError("cohens_kappa: no ratings");
  const double n = static_cast<double>(a.size());
  std::map<int, double> count_a;
  std::map<int, double> count_b;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    count_a[a[i]] += 1.0;
    count_b[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [category, ca] : count_a) {
    if (auto it = count_b.find(category); it != count_b.end()) p_e += (ca / n) * (it->second / n);
  }
  if (p_e == 1.0) return p_o == 1.0 ? std::optional<double>(1.0) : std::nullopt;
  return (p_o - p_e) / (1.0 - p_e);
}

inline const std::vector<double>& default_etas() {
  static const std::vector<double> etas{0.95, 0.90, 0.85, 0.80};
  return etas;
}

// Per-eta AP / ROC / MAE. Samples are grouped by (frame, run); each
// group is scored on its own, then runs are averaged per frame and frames
// aggregated. Every frame must appear in the same set of runs.
inline std::map<double, MetricReport> threshold_sweep(std::span<const ZoneSample> samples,
                                                      const std::vector<double>& etas = default_etas()) {
  if (samples.empty()) throw ParameterError("threshold_sweep: no samples");
  std::map<std::string, std::map<int, std::vector<const ZoneSample*>>> groups;
  std::set<int> runs;
  for (const auto& s : samples) {
    groups[s.frame_id][s.run].push_back(&s);
    runs.insert(s.run);
  }
  std::map<double, MetricReport> out;
  for (double eta : etas) {
    check_eta(eta);
    std::vector<std::vector<std::optional<double>>> ap, auc, err;
    for (const auto& [frame, by_run] : groups) {
      auto& ap_row = ap.emplace_back();
      auto& auc_row = auc.emplace_back();
      auto& err_row = err.emplace_back();
      for (int run : runs) {
        auto it = by_run.find(run);
        if (it == by_run.end()) {
          ap_row.emplace_back();
          auc_row.emplace_back();
          err_row.emplace_back();
          continue;
        }
        std::vector<double> scores;
        std::vector<int> labels;
        std::vector<ZoneSample> group;
        for (const ZoneSample* s : it->second) {
          scores.push_back(s->predicted);
          labels.push_back(s->truth >= eta ? 1 : 0);
          group.push_back(*s);
        }
        ap_row.push_back(average_precision(scores, labels));
        auc_row.push_back(roc_auc(scores, labels));
        err_row.push_back(mae(group));
      }
    }
    out[eta] = {{"AP", aggregate_stochastic(ap)}, {"MAE", aggregate_stochastic(err)},
                {"ROC", aggregate_stochastic(auc)}};
  }
  return out;
}

}  // namespace seesay
