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


// Command-line front end: run, eval, sweep, record-fixtures, synth.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seesay/config.hpp"
#include "seesay/dataset.hpp"
#include "seesay/evaluate.hpp"
#include "seesay/pipeline.hpp"
#include "seesay/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using namespace seesay;

struct RunOptions {
  fs::path dataset;
  std::optional<fs::path> config;
  std::optional<std::string> backend;
  std::optional<int> runs;
  std::optional<fs::path> out;
  std::optional<fs::path> prefs;
  std::optional<fs::path> fixtures;
  std::optional<int> stride;
  std::optional<int> workers;
  bool eta_sweep = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--dataset", o.dataset, "Dataset root (rgb/, depth/, gt/)")->required();
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--backend", o.backend, "Backend kind")->check(CLI::IsMember({"live", "replay", "stub"}));
  cmd->add_option("--runs", o.runs, "Stochastic runs per batch")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--pref-json", o.prefs, "Batch id to preference string map");
  cmd->add_option("--fixtures", o.fixtures, "Replay fixture directory");
  cmd->add_option("--stride", o.stride, "Frame stride")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", o.workers, "Concurrent batches")->check(CLI::PositiveNumber);
  cmd->add_flag("--eta-sweep", o.eta_sweep, "Evaluate against ground truth after the run");
}

RunConfig resolve_config(const RunOptions& o) {
  RunConfig config;
  if (o.config) config = load_config(*o.config);
  if (o.backend) config.backend = backend_from_string(*o.backend);
  if (o.runs) config.runs = *o.runs;
  if (o.out) config.output_dir = *o.out;
  if (o.prefs) config.preferences = load_preferences(*o.prefs);
  if (o.fixtures) config.fixtures_dir = *o.fixtures;
  if (o.stride) config.stride = *o.stride;
  if (o.workers) config.workers = *o.workers;
  config.validate();
  return config;
}

int run_pipeline(const RunOptions& o, const std::optional<fs::path>& record_to) {
  const RunConfig config = resolve_config(o);
  const IngestResult ingest = ingest_dataset(o.dataset, config.stride, config.frame_ids);
  const Logger log = stderr_logger();
  for (const auto& w : ingest.warnings) log("warning: " + w);
  if (ingest.batches.empty()) {
    log("no complete batch of five frames; nothing to do");
    return 1;
  }
  BackendSet backends = BackendSet::create(config, o.dataset, record_to);
  const RunSummary summary = run_all(ingest.batches, config, backends.view(), log);
  for (const auto& f : summary.failures) log("error: " + f);
  std::cout << summary.completed << " batch run(s) completed, " << summary.failures.size() << " failed\n";
  if (o.eta_sweep) {
    const EvaluationReport report = evaluate(o.dataset, config.output_dir);
    write_report(report, config.output_dir);
    std::cout << report_to_text(report);
  }
  return summary.failures.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe drop-zone selection from RGB, depth and language feedback"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run the pipeline on every batch of a dataset");
  add_run_options(run, run_opts);

  RunOptions record_opts;
  fs::path record_dir;
  auto* record = app.add_subcommand("record-fixtures", "Run with live backends and store replies as fixtures");
  add_run_options(record, record_opts);
  record->add_option("--record-to", record_dir, "Fixture directory to write")->required();

  fs::path eval_dataset, eval_results;
  std::optional<fs::path> eval_out;
  std::vector<double> etas = default_etas();
  bool all_zones = false;
  auto* eval = app.add_subcommand("eval", "Score a results tree against ground truth");
  eval->add_option("--dataset", eval_dataset, "Dataset root")->required();
  eval->add_option("--results", eval_results, "Results directory written by run")->required();
  eval->add_option("--out", eval_out, "Report directory (default: results directory)");
  eval->add_option("--etas", etas, "Safety thresholds")->check(CLI::Range(0.0, 1.0));
  eval->add_flag("--all-zones", all_zones, "Score every lattice zone instead of only those predicted >= eta");

  auto* sweep = app.add_subcommand("sweep", "Print zone metrics across safety thresholds");
  sweep->add_option("--dataset", eval_dataset, "Dataset root")->required();
  sweep->add_option("--results", eval_results, "Results directory written by run")->required();
  sweep->add_option("--etas", etas, "Safety thresholds")->check(CLI::Range(0.0, 1.0));
  sweep->add_flag("--all-zones", all_zones, "Score every lattice zone");

  fs::path synth_out;
  SyntheticSpec synth_spec;
  auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic dataset");
  synth->add_option("--out", synth_out, "Dataset directory")->required();
  synth->add_option("--width", synth_spec.width)->check(CLI::PositiveNumber);
  synth->add_option("--height", synth_spec.height)->check(CLI::PositiveNumber);
  synth->add_option("--frames", synth_spec.frames)->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_spec.seed);
  synth->add_flag("--all-unsafe", synth_spec.all_unsafe, "Detector covers the whole frame");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_pipeline(run_opts, std::nullopt);
    if (record->parsed()) {
      if (!record_opts.backend) record_opts.backend = "live";
      return run_pipeline(record_opts, record_dir);
    }
    if (eval->parsed() || sweep->parsed()) {
      const EvaluationReport report = evaluate(eval_dataset, eval_results, etas, !all_zones);
      if (eval->parsed()) write_report(report, eval_out.value_or(eval_results));
      std::cout << report_to_text(report);
      return 0;
    }
    if (synth->parsed()) {
      write_synthetic_dataset(synth_out, synth_spec);
      std::cout << "wrote " << synth_out.string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
