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


#include <benchmark/benchmark.h>

#include "hmsbl/msbl.hpp"
#include "hmsbl/solver.hpp"

using namespace hmsbl;

namespace {

constexpr int kIters = 10;

SnapshotSet scene_data() {
  Scene scene{{{0.31, -0.12}, {-0.42, 0.25}, {0.05, 0.6}}, 20.0, 50, 99};
  return synthesize_snapshots(scene, {4, 4});
}

HMsblParams timing_params() {
  HMsblParams p;
  p.max_iters = kIters;
  p.cost_tol = 0.0;
  p.prune_mode = PruneMode::off;
  p.noise = NoisePolicy::fixed(noise_variance(20.0));
  return p;
}

DictionaryPair pair_for(int mv) { return DictionaryPair::build({4, 4}, uniform_grid(100), uniform_grid(mv)); }

// Time per EM iteration; the v-grid size only affects read-out for H-MSBL.
void BM_HmsblIteration(benchmark::State& state) {
  const SnapshotSet y = scene_data();
  const BlockDictionary dict = BlockDictionary::hmsbl(pair_for(static_cast<int>(state.range(0))));
  const HMsblParams p = timing_params();
  for (auto _ : state) benchmark::DoNotOptimize(run(y, dict, p));
  state.SetItemsProcessed(state.iterations() * kIters);
}

void BM_MsblIteration(benchmark::State& state) {
  const SnapshotSet y = scene_data();
  const KronDictionary kd = kron_dictionary(pair_for(static_cast<int>(state.range(0))), true);
  const HMsblParams p = timing_params();
  for (auto _ : state) benchmark::DoNotOptimize(msbl_run(y, kd, p));
  state.SetItemsProcessed(state.iterations() * kIters);
  state.counters["columns"] = static_cast<double>(kd.columns());
}

void BM_EStep(benchmark::State& state) {
  const SnapshotSet y = scene_data();
  const BlockDictionary dict = BlockDictionary::hmsbl(pair_for(100));
  const HMsblState s = init_state(y, dict, timing_params());
  for (auto _ : state) benchmark::DoNotOptimize(e_step(y, s, dict));
}

void BM_Compress(benchmark::State& state) {
  Scene scene{{{0.2, 0.1}}, 20.0, static_cast<int>(state.range(0)), 7};
  const SnapshotSet y = synthesize_snapshots(scene, {4, 4});
  for (auto _ : state) benchmark::DoNotOptimize(compress_snapshots(y));
}

}  // namespace

BENCHMARK(BM_HmsblIteration)->Arg(25)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MsblIteration)->Arg(25)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EStep)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Compress)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
