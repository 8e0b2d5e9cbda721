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

// Scores a results tree written by run_all against the dataset's ground
// truth: pixel metrics on the final masks, per-eta zone metrics on the
// lattice, pooled ROC/PR curves and the pad-safety success rate.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "seesay/image.hpp"
#include "seesay/metrics.hpp"
#include "seesay/pipeline.hpp"
#include "seesay/zones.hpp"

namespace seesay {

// One batch output of one run.
struct ResultEntry {
  int run = 0;
  std::string batch_id;
  std::string frame_id;
  std::filesystem::path dir;
};

// Accepts either <root>/<batch>/ (single run) or <root>/run_<k>/<batch>/.
// Batches whose manifest does not report success are skipped with a warning.
inline std::vector<ResultEntry> discover_results(const std::filesystem::path& root,
                                                 std::vector<std::string>& warnings) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw ConfigError("results directory not found: " + root.string());
  std::vector<std::pair<int, fs::path>> run_dirs;
  static const std::regex run_name("run_([0-9]+)");
  for (const auto& entry : fs::directory_iterator(root)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && std::regex_match(name, m, run_name)) {
      run_dirs.emplace_back(std::stoi(m[1]), entry.path());
    }
  }
  if (run_dirs.empty()) run_dirs.emplace_back(0, root);

  std::vector<ResultEntry> out;
  for (const auto& [run, dir] : run_dirs) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const fs::path manifest_path = entry.path() / "manifest.json";
      if (!entry.is_directory() || !fs::exists(manifest_path)) continue;
      const auto manifest = nlohmann::json::parse(read_text_file(manifest_path));
      const std::string batch_id = manifest.at("batch_id").get<std::string>();
      if (manifest.value("status", "") != "ok") {
        warnings.push_back(batch_id + " run " + std::to_string(run) + ": batch failed, skipped");
        continue;
      }
      out.push_back({run, batch_id, manifest.at("decision_frame").get<std::string>(), entry.path()});
    }
  }
  std::sort(out.begin(), out.end(), [](const ResultEntry& a, const ResultEntry& b) {
    return std::tie(a.batch_id, a.run) < std::tie(b.batch_id, b.run);
  });
  return out;
}

inline const std::vector<std::string>& pixel_metric_names() {
  static const std::vector<std::string> names{"IoU",         "Dice/F1",  "Precision",     "Recall",
                                              "Specificity", "Accuracy", "Balanced Acc."};
  return names;
}

inline std::vector<std::optional<double>> pixel_metric_values(const PixelMetrics& m) {
  return {m.iou, m.dice, m.precision, m.recall, m.specificity, m.accuracy, m.balanced_accuracy};
}

struct EvaluationReport {
  int frames = 0;  // decision frames with ground truth
  int runs = 0;
  MetricReport pixel;
  std::map<double, MetricReport> zones;
  std::map<double, PooledCurves> curves;
  std::map<double, std::vector<std::string>> frames_without_samples;
  std::optional<double> success_rate;
  int success_frames = 0;
  std::vector<std::string> warnings;
};

// Ground-truth safe ratio of every lattice disk, paired with the predicted one.
inline std::vector<ZoneSample> lattice_samples(const std::filesystem::path& lattice_path, const BinaryMask& truth,
                                               const std::string& frame_id, int run) {
  const auto j = nlohmann::json::parse(read_text_file(lattice_path));
  if (j.at("width").get<int>() != truth.width() || j.at("height").get<int>() != truth.height()) {
    throw StructuralError("lattice and ground truth dimensions differ for frame " + frame_id);
  }
  std::vector<ZoneSample> out;
  for (const auto& z : j.at("zones")) {
    const CandidateZone c = candidate_from_json(z);
    out.push_back({c.safe_ratio, safe_ratio(c.center, c.radius, truth), frame_id, run});
  }
  return out;
}

// With `filter_by_prediction`, zone metrics at eta use only the zones each
// method would select (predicted ratio >= eta), labelled by ground truth.
inline EvaluationReport evaluate(const std::filesystem::path& dataset_root, const std::filesystem::path& results_dir,
                                 const std::vector<double>& etas = default_etas(), bool filter_by_prediction = true) {
  namespace fs = std::filesystem;
  EvaluationReport report;
  const auto entries = discover_results(results_dir, report.warnings);

  std::set<int> runs;
  for (const auto& e : entries) runs.insert(e.run);
  report.runs = static_cast<int>(runs.size());

  std::map<std::string, bool> pad_labels;
  if (const fs::path p = dataset_root / "pad_labels.json"; fs::exists(p)) {
    const auto labels = nlohmann::json::parse(read_text_file(p));
    for (const auto& [id, v] : labels.items()) pad_labels[id] = v.get<bool>();
  }

  // frame -> run -> values
  std::map<std::string, std::map<int, std::vector<std::optional<double>>>> pixel_rows;
  std::map<std::string, std::map<int, int>> pad_scores;
  std::vector<ZoneSample> samples;
  std::set<std::string> frames_with_truth;

  for (const auto& e : entries) {
    if (const auto it = pad_labels.find(e.frame_id); it != pad_labels.end()) {
      const auto verdict = nlohmann::json::parse(read_text_file(e.dir / "verdict.json"));
      const std::string predicted = verdict.at("pad_safety").get<std::string>();
      pad_scores[e.frame_id][e.run] = predicted == (it->second ? "safe" : "unsafe") ? 1 : 0;
    }
    const fs::path gt_path = dataset_root / "gt" / (e.frame_id + ".png");
    if (!fs::exists(gt_path)) {
      report.warnings.push_back(e.batch_id + ": no ground truth for frame " + e.frame_id + ", skipped");
      continue;
    }
    frames_with_truth.insert(e.frame_id);
    const BinaryMask truth = load_mask_png(gt_path);
    const BinaryMask predicted = load_mask_png(e.dir / "final_mask.png");
    pixel_rows[e.frame_id][e.run] = pixel_metric_values(pixel_metrics(confusion(predicted, truth)));
    const auto zs = lattice_samples(e.dir / ("lattice_" + e.frame_id + ".json"), truth, e.frame_id, e.run);
    samples.insert(samples.end(), zs.begin(), zs.end());
  }
  report.frames = static_cast<int>(frames_with_truth.size());

  const auto& names = pixel_metric_names();
  for (std::size_t m = 0; m < names.size(); ++m) {
    std::vector<std::vector<std::optional<double>>> table;
    for (const auto& [frame, by_run] : pixel_rows) {
      auto& row = table.emplace_back();
      for (int run : runs) {
        const auto it = by_run.find(run);
        row.push_back(it == by_run.end() ? std::nullopt : it->second[m]);
      }
    }
    if (!table.empty()) report.pixel[names[m]] = aggregate_stochastic(table);
  }

  for (double eta : etas) {
    check_eta(eta);
    std::vector<ZoneSample> kept;
    for (const auto& s : samples) {
      if (!filter_by_prediction || s.predicted >= eta) kept.push_back(s);
    }
    std::set<std::string> sampled;
    for (const auto& s : kept) sampled.insert(s.frame_id);
    for (const auto& f : frames_with_truth) {
      if (!sampled.count(f)) report.frames_without_samples[eta].push_back(f);
    }
    report.zones[eta] = kept.empty() ? MetricReport{} : threshold_sweep(kept, {eta}).at(eta);
    report.curves[eta] = pooled_curves(kept, eta);
  }

  if (!pad_scores.empty()) {
    std::vector<std::vector<int>> table;
    for (const auto& [frame, by_run] : pad_scores) {
      auto& row = table.emplace_back();
      for (const auto& [run, score] : by_run) row.push_back(score);
    }
    report.success_rate = pad_safety_success_rate(table);
    report.success_frames = static_cast<int>(table.size());
  }
  return report;
}

inline std::string eta_label(double eta) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", eta);
  return buf;
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json summary_json(const MetricSummary& s) {
  return {{"mean", optional_json(s.mean)}, {"std", s.stddev}, {"frames", s.frames}, {"excluded", s.excluded}};
}

inline nlohmann::ordered_json report_to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["frames"] = r.frames;
  j["runs"] = r.runs;
  nlohmann::ordered_json pixel = nlohmann::ordered_json::object();
  for (const auto& name : pixel_metric_names()) {
    if (const auto it = r.pixel.find(name); it != r.pixel.end()) pixel[name] = summary_json(it->second);
  }
  j["pixel"] = pixel;
  nlohmann::ordered_json zones = nlohmann::ordered_json::object();
  for (auto it = r.zones.rbegin(); it != r.zones.rend(); ++it) {
    const double eta = it->first;
    nlohmann::ordered_json entry = nlohmann::ordered_json::object();
    for (const char* name : {"AP", "ROC", "MAE"}) {
      if (const auto m = it->second.find(name); m != it->second.end()) entry[name] = summary_json(m->second);
    }
    const auto& curves = r.curves.at(eta);
    entry["pooled"] = {{"ap", optional_json(curves.ap)},
                       {"auc", optional_json(curves.auc)},
                       {"points", curves.roc.size()},
                       {"diagnostic", curves.diagnostic.empty() ? nlohmann::ordered_json(nullptr)
                                                                : nlohmann::ordered_json(curves.diagnostic)}};
    const auto missing = r.frames_without_samples.find(eta);
    entry["frames_without_samples"] = missing == r.frames_without_samples.end()
                                          ? nlohmann::ordered_json::array()
                                          : nlohmann::ordered_json(missing->second);
    zones[eta_label(eta)] = entry;
  }
  j["zones"] = zones;
  j["success_rate"] = optional_json(r.success_rate);
  j["success_frames"] = r.success_frames;
  j["warnings"] = r.warnings;
  return j;
}

inline std::string format_summary(const MetricSummary& s) {
  if (!s.mean) return "n/a";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f +/- %.4f", *s.mean, s.stddev);
  return buf;
}

inline std::string report_to_text(const EvaluationReport& r) {
  std::ostringstream out;
  char line[160];
  out << "frames: " << r.frames << "  runs: " << r.runs << "\n\n";
  out << "Pixel metrics (unsafe = positive)\n";
  for (const auto& name : pixel_metric_names()) {
    const auto it = r.pixel.find(name);
    std::snprintf(line, sizeof line, "  %-14s %s\n", name.c_str(),
                  it == r.pixel.end() ? "n/a" : format_summary(it->second).c_str());
    out << line;
  }
  out << "\nZone metrics\n";
  std::snprintf(line, sizeof line, "  %-6s %-20s %-20s %-20s\n", "eta", "AP", "ROC", "MAE");
  out << line;
  for (auto it = r.zones.rbegin(); it != r.zones.rend(); ++it) {
    auto cell = [&](const char* name) {
      const auto m = it->second.find(name);
      return m == it->second.end() ? std::string("n/a") : format_summary(m->second);
    };
    std::snprintf(line, sizeof line, "  %-6s %-20s %-20s %-20s\n", eta_label(it->first).c_str(),
                  cell("AP").c_str(), cell("ROC").c_str(), cell("MAE").c_str());
    out << line;
  }
  for (const auto& [eta, frames] : r.frames_without_samples) {
    out << "  eta " << eta_label(eta) << ": no zone samples for";
    for (const auto& f : frames) out << " " << f;
    out << "\n";
  }
  out << "\nPad safety success rate: ";
  if (r.success_rate) {
    std::snprintf(line, sizeof line, "%.4f (%d frames)\n", *r.success_rate, r.success_frames);
    out << line;
  } else {
    out << "n/a\n";
  }
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  return out.str();
}

inline std::string format_threshold(double t) {
  if (std::isinf(t)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

inline std::string roc_csv(std::span<const RocPoint> points) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : points) {
    out += format_threshold(p.threshold) + "," + format_threshold(p.fpr) + "," + format_threshold(p.tpr) + "\n";
  }
  return out;
}

inline std::string pr_csv(std::span<const PrPoint> points) {
  std::string out = "threshold,recall,precision\n";
  for (const auto& p : points) {
    out += format_threshold(p.threshold) + "," + format_threshold(p.recall) + "," +
           format_threshold(p.precision) + "\n";
  }
  return out;
}

// report.json, report.txt, roc_eta<eta>.csv and pr_eta<eta>.csv.
inline void write_report(const EvaluationReport& r, const std::filesystem::path& dir) {
  write_text_file(dir / "report.json", report_to_json(r).dump(2) + "\n");
  write_text_file(dir / "report.txt", report_to_text(r));
  for (const auto& [eta, curves] : r.curves) {
    write_text_file(dir / ("roc_eta" + eta_label(eta) + ".csv"), roc_csv(curves.roc));
    write_text_file(dir / ("pr_eta" + eta_label(eta) + ".csv"), pr_csv(curves.pr));
  }
}

}  // namespace seesay
