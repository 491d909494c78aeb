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


#include "hmsbl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "hmsbl/dictionary.hpp"
#include "hmsbl/msbl.hpp"
#include "hmsbl/random.hpp"

#ifndef HMSBL_VERSION
#define HMSBL_VERSION "unknown"
#endif

namespace hmsbl {

const AlgorithmRun* TrialRecord::find(const std::string& algorithm) const {
  for (const auto& r : runs) {
    if (r.algorithm == algorithm) return &r;
  }
  return nullptr;
}

int resolve_worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HMSBL_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> draw_separated(int grid_size, int count, int min_sep, std::mt19937_64& engine) {
  std::uniform_int_distribution<int> pick(0, grid_size - 1);
  std::vector<int> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++guard > 100000) throw ArgumentError("could not place sources with the requested separation");
    const int c = pick(engine);
    const bool clash = std::any_of(out.begin(), out.end(),
                                   [&](int o) { return std::abs(o - c) < min_sep; });
    if (!clash) out.push_back(c);
  }
  return out;
}

HMsblParams params_for(const AlgorithmConfig& alg, double snr_db) {
  HMsblParams p = alg.params;
  switch (alg.lambda) {
    case LambdaSetting::oracle: p.noise = NoisePolicy::fixed(noise_variance(snr_db)); break;
    case LambdaSetting::value: p.noise = NoisePolicy::fixed(alg.lambda_value); break;
    case LambdaSetting::adaptive: p.noise = NoisePolicy::adaptive(); break;
  }
  return p;
}

struct HmsblReadout {
  PairedEstimates estimates;
  bool fallback = false;
};

HmsblReadout read_hmsbl(const HMsblState& state, const Grid1D& grid_u, const std::vector<int>& counts) {
  const PeakSelection peaks = select_peaks(state.gamma, static_cast<int>(counts.size()));
  for (const Index i : peaks.indices) {
    if (!state.active[static_cast<std::size_t>(i)]) {
      throw SolverError("fewer active u-blocks than requested peaks");
    }
  }
  return {pair_estimates(state, grid_u, allocate_peaks(peaks, counts)), peaks.fallback};
}

PairedEstimates as_paired(const std::vector<Source>& sources) {
  PairedEstimates out;
  for (const auto& s : sources) out.pairs.push_back({s.u, s.v, -1, 0.0, false});
  return out;
}

double readout_rmse(const std::vector<Source>& est, const std::vector<Source>& truth) {
  try {
    return match_and_rmse(est, truth).rmse;
  } catch (const std::exception&) {
    return kNaN;
  }
}

AlgorithmRun solve_hmsbl(const ExperimentConfig& cfg, const SnapshotSet& y,
                         const DictionaryPair& pair, const std::vector<Source>& truth, bool track) {
  AlgorithmRun run;
  run.algorithm = kHmsbl;
  const std::vector<int> counts =
      cfg.hmsbl.allocation.empty() ? std::vector<int>(truth.size(), 1) : cfg.hmsbl.allocation;
  try {
    IterationObserver observer;
    if (track) {
      observer = [&](int, const HMsblState& state) {
        double value = kNaN;
        try {
          value = readout_rmse(read_hmsbl(state, pair.grid_u, counts).estimates.sources(), truth);
        } catch (const std::exception&) {
        }
        run.rmse_by_iteration.push_back(value);
      };
    }
    const SolverResult result =
        hmsbl::run(y, BlockDictionary::hmsbl(pair), params_for(cfg.hmsbl, cfg.snr_db), observer);
    run.diagnostics = result.diagnostics;
    const HmsblReadout readout = read_hmsbl(result.state, pair.grid_u, counts);
    run.estimates = readout.estimates.pairs;
    run.peak_fallback = readout.fallback;
    run.match = match_and_rmse(readout.estimates.sources(), truth);
  } catch (const MatchError& e) {
    run.match = e.partial();
    run.error = e.what();
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

AlgorithmRun solve_msbl(const ExperimentConfig& cfg, const SnapshotSet& y, const DictionaryPair& pair,
                        const std::vector<Source>& truth, bool track) {
  AlgorithmRun run;
  run.algorithm = kMsbl;
  const int k = static_cast<int>(truth.size());
  try {
    const KronDictionary kd = kron_dictionary(pair, true);
    MsblObserver observer;
    if (track) {
      observer = [&](int, const MsblState& state) {
        double value = kNaN;
        try {
          value = readout_rmse(msbl_estimates(state, k), truth);
        } catch (const std::exception&) {
        }
        run.rmse_by_iteration.push_back(value);
      };
    }
    const MsblResult result = msbl_run(y, kd, params_for(cfg.msbl, cfg.snr_db), observer);
    run.diagnostics = result.diagnostics;
    const auto est = msbl_estimates(result.state, k);
    run.estimates = as_paired(est).pairs;
    run.match = match_and_rmse(est, truth);
  } catch (const MatchError& e) {
    run.match = e.partial();
    run.error = e.what();
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

Scene trial_scene(const ExperimentConfig& cfg, int trial) {
  Scene scene;
  scene.sources = trial_sources(cfg, trial);
  scene.snr_db = cfg.snr_db;
  scene.num_snapshots = cfg.snapshots;
  scene.seed = derive_seed(cfg.seed, Stream::trial, static_cast<std::uint64_t>(trial));
  return scene;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<ConvergenceRow> convergence_rows(const std::vector<TrialRecord>& trials,
                                             const std::string& algorithm, int max_iters) {
  std::vector<ConvergenceRow> rows;
  for (int it = 1; it <= max_iters; ++it) {
    double sum = 0.0;
    int n = 0;
    for (const auto& t : trials) {
      const AlgorithmRun* run = t.find(algorithm);
      if (!run || !run->error.empty() || run->rmse_by_iteration.empty()) continue;
      const auto& trace = run->rmse_by_iteration;
      const double value = trace[static_cast<std::size_t>(std::min<int>(it, static_cast<int>(trace.size())) - 1)];
      if (!std::isfinite(value)) continue;
      sum += value;
      ++n;
    }
    if (n > 0) rows.push_back({it, algorithm, sum / n});
  }
  return rows;
}

}  // namespace

std::vector<Source> trial_sources(const ExperimentConfig& cfg, int trial) {
  const SourceSpec& spec = cfg.sources;
  switch (spec.kind) {
    case SourceSpec::Kind::explicit_list:
      return spec.sources;
    case SourceSpec::Kind::grid_product: {
      const Grid1D gu = uniform_grid(cfg.mu);
      const Grid1D gv = uniform_grid(cfg.mv);
      std::vector<Source> out;
      for (const int iu : spec.u_indices) {
        for (const int iv : spec.v_indices) {
          const Source s{gu[iu], gv[iv]};
          if (!s.feasible()) throw DomainError("grid_product source violates u^2 + v^2 <= 1");
          out.push_back(s);
        }
      }
      return out;
    }
    case SourceSpec::Kind::random_on_grid: {
      auto engine = make_engine(cfg.seed, Stream::scene, static_cast<std::uint64_t>(trial));
      const Grid1D gu = uniform_grid(cfg.mu);
      const Grid1D gv = uniform_grid(cfg.mv);
      for (int attempt = 0; attempt < 10000; ++attempt) {
        const auto iu = draw_separated(cfg.mu, spec.count, spec.min_separation, engine);
        const auto iv = draw_separated(cfg.mv, spec.count, spec.min_separation, engine);
        std::vector<Source> out;
        for (int k = 0; k < spec.count; ++k) {
          out.push_back({gu[iu[static_cast<std::size_t>(k)]], gv[iv[static_cast<std::size_t>(k)]]});
        }
        if (std::all_of(out.begin(), out.end(), [](const Source& s) { return s.feasible(); })) return out;
      }
      throw ArgumentError("could not draw a feasible random source set");
    }
  }
  return {};
}

TrialRecord run_trial(const ExperimentConfig& cfg, int trial) {
  TrialRecord rec;
  rec.trial = trial;
  const Scene scene = trial_scene(cfg, trial);
  rec.truth = scene.sources;
  const SnapshotSet y = synthesize_snapshots(scene, cfg.array);
  const DictionaryPair pair =
      DictionaryPair::build(cfg.array, uniform_grid(cfg.mu), uniform_grid(cfg.mv));
  const bool track = !cfg.budgets.empty();

  if (cfg.hmsbl.enabled) rec.runs.push_back(solve_hmsbl(cfg, y, pair, rec.truth, track));
  if (cfg.msbl.enabled) rec.runs.push_back(solve_msbl(cfg, y, pair, rec.truth, track));
  return rec;
}

std::vector<TimingRow> run_timing_sweep(const ExperimentConfig& cfg) {
  std::vector<TimingRow> rows;
  if (cfg.mv_sweep.empty()) return rows;
  const Scene scene = trial_scene(cfg, 0);
  const SnapshotSet y = synthesize_snapshots(scene, cfg.array);

  auto timing_params = [&](const AlgorithmConfig& alg) {
    HMsblParams p = params_for(alg, cfg.snr_db);
    p.max_iters = cfg.timing.iterations;
    p.cost_tol = 0.0;
    p.prune_mode = PruneMode::off;
    return p;
  };

  // Dictionaries are built up front and the repetitions interleaved so that
  // drift in machine speed does not masquerade as a trend in mv.
  std::vector<DictionaryPair> pairs;
  for (const int mv : cfg.mv_sweep) {
    pairs.push_back(DictionaryPair::build(cfg.array, uniform_grid(cfg.mu), uniform_grid(mv)));
  }
  std::vector<BlockDictionary> block_dicts;
  std::vector<KronDictionary> kron_dicts;
  std::vector<std::function<int()>> closures;
  const HMsblParams hp = timing_params(cfg.hmsbl);
  const HMsblParams mp = timing_params(cfg.msbl);
  block_dicts.reserve(pairs.size());
  kron_dicts.reserve(pairs.size());
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    if (cfg.hmsbl.enabled) {
      rows.push_back({kHmsbl, cfg.mv_sweep[s], 0, 0.0, 0.0});
      const BlockDictionary& dict = block_dicts.emplace_back(BlockDictionary::hmsbl(pairs[s]));
      rows.back().grid_columns = dict.blocks();
      closures.push_back([&y, &dict, &hp] { return run(y, dict, hp).diagnostics.iterations; });
    }
    if (cfg.msbl.enabled) {
      rows.push_back({kMsbl, cfg.mv_sweep[s], 0, 0.0, 0.0});
      const KronDictionary& kd = kron_dicts.emplace_back(kron_dictionary(pairs[s], true));
      rows.back().grid_columns = kd.columns();
      closures.push_back([&y, &kd, &mp] { return msbl_run(y, kd, mp).diagnostics.iterations; });
    }
  }
  const std::vector<TimingResult> times = timeit_interleaved(closures, cfg.timing.repetitions);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].median_seconds = times[i].median_seconds;
    rows[i].seconds_per_iteration = times[i].per_iteration_seconds.value_or(kNaN);
  }
  return rows;
}

std::string tool_version() { return HMSBL_VERSION; }

ResultRecord run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  ResultRecord rec;
  rec.config = config_to_json(cfg);
  rec.tool_version = tool_version();
  rec.timestamp = utc_timestamp();

  // Trials are independent; results land in their own slot so the output
  // order never depends on scheduling.
  rec.trials.resize(static_cast<std::size_t>(cfg.trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      try {
        rec.trials[static_cast<std::size_t>(t)] = run_trial(cfg, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::min(resolve_worker_count(options.workers), cfg.trials);
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  for (const char* name : {kHmsbl, kMsbl}) {
    std::vector<MatchReport> reports;
    std::size_t attempted = 0;
    for (const auto& t : rec.trials) {
      const AlgorithmRun* run = t.find(name);
      if (!run) continue;
      ++attempted;
      if (run->error.empty() && run->match) reports.push_back(*run->match);
    }
    if (reports.empty()) continue;
    // RMSE statistics cover completed runs; failed runs still count against
    // the success rate.
    TrialSummary s = aggregate_trials(reports, cfg.success_threshold);
    s.success_rate *= static_cast<double>(reports.size()) / static_cast<double>(attempted);
    rec.summary[name] = s;
  }

  if (!cfg.budgets.empty()) {
    if (cfg.hmsbl.enabled) {
      auto rows = convergence_rows(rec.trials, kHmsbl, cfg.hmsbl.params.max_iters);
      rec.convergence.insert(rec.convergence.end(), rows.begin(), rows.end());
    }
    if (cfg.msbl.enabled) {
      auto rows = convergence_rows(rec.trials, kMsbl, cfg.msbl.params.max_iters);
      rec.convergence.insert(rec.convergence.end(), rows.begin(), rows.end());
    }
  }

  if (!options.skip_timing) rec.timing = run_timing_sweep(cfg);
  return rec;
}

}  // namespace hmsbl
