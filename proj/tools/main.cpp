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


// Command-line front end: run, validate, emit-plots, bench.
//
// Exit codes: 0 success, 1 usage or I/O failure, 2 invalid config,
// 3 at least one solver run failed (results are still written).

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hmsbl/config.hpp"
#include "hmsbl/experiment.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalidConfig = 2, kSolverFailure = 3 };

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Prints every validation error and returns the config when valid.
std::optional<hmsbl::ExperimentConfig> load_config(const fs::path& path) {
  hmsbl::ConfigResult result = hmsbl::validate_config(slurp(path));
  for (const auto& e : result.errors) std::cerr << path.string() << ": " << e << '\n';
  return result.config;
}

int cmd_validate(const fs::path& path) {
  const auto cfg = load_config(path);
  if (!cfg) return kInvalidConfig;
  std::cout << path.string() << ": ok (" << hmsbl::to_string(cfg->experiment) << ", " << cfg->trials
            << " trials, K=" << cfg->source_count() << ")\n";
  return kOk;
}

int cmd_run(const fs::path& path, std::string output, int workers, bool skip_timing) {
  const auto cfg = load_config(path);
  if (!cfg) return kInvalidConfig;
  if (output.empty()) output = cfg->output;

  hmsbl::RunOptions options;
  options.workers = workers;
  options.skip_timing = skip_timing;
  const hmsbl::ResultRecord record = hmsbl::run_experiment(*cfg, options);

  for (const auto& file : hmsbl::write_result(record, output)) std::cout << "wrote " << file.string() << '\n';
  for (const auto& [name, s] : record.summary) {
    std::printf("%-6s trials=%zu mean_rmse=%.6g std_rmse=%.6g success=%.3f\n", name.c_str(), s.count,
                s.mean_rmse, s.std_rmse, s.success_rate);
  }

  int failures = 0;
  for (const auto& t : record.trials) {
    for (const auto& r : t.runs) {
      if (r.error.empty()) continue;
      ++failures;
      std::cerr << "trial " << t.trial << " " << r.algorithm << ": " << r.error << '\n';
    }
  }
  return failures == 0 ? kOk : kSolverFailure;
}

int cmd_emit_plots(const fs::path& record_path, const std::string& kind_name, std::string output) {
  const auto kind = hmsbl::parse_plot_kind(kind_name);
  if (!kind) {
    std::cerr << "unknown plot kind '" << kind_name << "' (timing, scatter, convergence, all)\n";
    return kFailure;
  }
  const auto doc = nlohmann::json::parse(slurp(record_path));
  const hmsbl::ResultRecord record = hmsbl::record_from_json(doc);
  if (output.empty()) output = record_path.parent_path().string();
  if (output.empty()) output = ".";
  for (const auto& file : hmsbl::emit_plot_data(record, *kind, output)) {
    std::cout << "wrote " << file.string() << '\n';
  }
  return kOk;
}

int cmd_bench(const fs::path& path) {
  auto cfg = load_config(path);
  if (!cfg) return kInvalidConfig;
  if (cfg->mv_sweep.empty()) cfg->mv_sweep = {cfg->mv};
  std::printf("%-6s %6s %10s %14s %14s\n", "alg", "mv", "columns", "median_s", "s_per_iter");
  for (const auto& row : hmsbl::run_timing_sweep(*cfg)) {
    std::printf("%-6s %6d %10lld %14.6g %14.6g\n", row.algorithm.c_str(), row.mv,
                static_cast<long long>(row.grid_columns), row.median_seconds, row.seconds_per_iteration);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block sparse Bayesian learning for 2-D harmonic retrieval"};
  app.set_version_flag("--version", hmsbl::tool_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string record_path;
  std::string output;
  std::string kind = "all";
  int workers = 0;
  bool skip_timing = false;

  auto* run = app.add_subcommand("run", "Run an experiment and write record.json plus plot CSVs");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Output directory (default: config 'output')");
  run->add_option("-j,--workers", workers, "Trial workers (default: $HMSBL_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--skip-timing", skip_timing, "Skip the Mv timing sweep");

  auto* validate = app.add_subcommand("validate", "Check a config and list every problem found");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* emit = app.add_subcommand("emit-plots", "Regenerate plot CSVs from a record.json");
  emit->add_option("record", record_path, "Result record (JSON)")->required()->check(CLI::ExistingFile);
  emit->add_option("-k,--kind", kind, "timing | scatter | convergence | all");
  emit->add_option("-o,--output", output, "Output directory (default: next to the record)");

  auto* bench = app.add_subcommand("bench", "Print per-iteration timing across the config's Mv sweep");
  bench->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, output, workers, skip_timing);
    if (*validate) return cmd_validate(config_path);
    if (*emit) return cmd_emit_plots(record_path, kind, output);
    if (*bench) return cmd_bench(config_path);
  } catch (const hmsbl::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
