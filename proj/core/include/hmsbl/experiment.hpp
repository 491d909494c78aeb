// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The hmsbl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmsbl/config.hpp"
#include "hmsbl/metrics.hpp"
#include "hmsbl/solver.hpp"
#include "hmsbl/v_extract.hpp"

namespace hmsbl {

inline constexpr const char* kHmsbl = "hmsbl";
inline constexpr const char* kMsbl = "msbl";

struct AlgorithmRun {
  std::string algorithm;
  std::vector<PairedEstimate> estimates;
  std::optional<MatchReport> match;
  Diagnostics diagnostics;
  /// RMSE of the estimates read out after each iteration (index 0 is
  /// iteration 1); filled only when convergence tracking is on.
  std::vector<double> rmse_by_iteration;
  bool peak_fallback = false;
  std::string error;  // non-empty when the run failed
};

struct TrialRecord {
  int trial = 0;
  std::vector<Source> truth;
  std::vector<AlgorithmRun> runs;

  const AlgorithmRun* find(const std::string& algorithm) const;
};

struct TimingRow {
  std::string algorithm;
  int mv = 0;
  Index grid_columns = 0;  // dictionary columns the solver iterates over
  double median_seconds = 0.0;
  double seconds_per_iteration = 0.0;
};

struct ConvergenceRow {
  int iteration = 0;
  std::string algorithm;
  double rmse = 0.0;
};

struct ResultRecord {
  nlohmann::json config;  // normalized echo, re-validates
  std::string tool_version;
  std::string timestamp;
  std::vector<TrialRecord> trials;
  std::map<std::string, TrialSummary> summary;
  std::vector<TimingRow> timing;
  std::vector<ConvergenceRow> convergence;
};

struct RunOptions {
  /// 0 picks HMSBL_WORKERS from the environment, else hardware concurrency.
  int workers = 0;
  /// Skip the timing sweep even when the config has one.
  bool skip_timing = false;
};

/// Library version string, also stamped into every ResultRecord.
std::string tool_version();

int resolve_worker_count(int requested);

/// True sources of one trial, deterministic in (config seed, trial).
std::vector<Source> trial_sources(const ExperimentConfig& config, int trial);

/// Solves one trial with every enabled algorithm.
TrialRecord run_trial(const ExperimentConfig& config, int trial);

/// Per-iteration wall time of each algorithm for every v-grid size in
/// grids.mv_sweep, on the data of trial 0. Pruning is off and iteration
/// counts are fixed so every run does the same amount of work.
std::vector<TimingRow> run_timing_sweep(const ExperimentConfig& config);

ResultRecord run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

nlohmann::json record_to_json(const ResultRecord& record);
ResultRecord record_from_json(const nlohmann::json& doc);

enum class PlotKind { timing, scatter, convergence, all };

std::optional<PlotKind> parse_plot_kind(const std::string& name);

/// Writes flat CSV files into `dir`:
///   timing.csv       mv,seconds,algorithm
///   scatter.csv      trial,u,v,is_truth,algorithm
///   convergence.csv  iteration,rmse,algorithm
/// Values use 17 significant digits so they parse back exactly.
std::vector<std::filesystem::path> emit_plot_data(const ResultRecord& record, PlotKind kind,
                                                  const std::filesystem::path& dir);

/// Writes record.json plus all plot CSVs under `dir`.
std::vector<std::filesystem::path> write_result(const ResultRecord& record,
                                                const std::filesystem::path& dir);

}  // namespace hmsbl
