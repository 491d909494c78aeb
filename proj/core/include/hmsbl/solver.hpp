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

#include <functional>
#include <vector>

#include "hmsbl/dictionary.hpp"
#include "hmsbl/signal_model.hpp"
#include "hmsbl/types.hpp"

namespace hmsbl {

enum class NoiseMode { fixed, adaptive };

/// How the noise variance lambda is handled. `fixed` holds it at `value`
/// throughout. `adaptive` starts from 0.01 * tr(S_y) / N and applies the
/// stabilized re-estimate every iteration; it is experimental.
struct NoisePolicy {
  NoiseMode mode = NoiseMode::fixed;
  double value = 1e-2;

  static NoisePolicy fixed(double lambda) { return {NoiseMode::fixed, lambda}; }
  static NoisePolicy adaptive() { return {NoiseMode::adaptive, 0.0}; }
};

enum class PruneMode {
  off,
  relative,  // gamma_i < tol * max_j gamma_j
  absolute,  // gamma_i < tol
};

struct HMsblParams {
  int max_iters = 500;
  double prune_tol = 1e-3;
  PruneMode prune_mode = PruneMode::relative;
  double b_loading = 1e-10;
  /// Relative cost-change stopping threshold; 0 runs exactly max_iters.
  double cost_tol = 1e-8;
  NoisePolicy noise;
  bool compress = false;

  void validate() const;
};

/// Hyperparameters of the block prior x^i ~ N(0, gamma_i B_i).
///
/// Pruned blocks have active[i] == false and gamma[i] == 0; their B_i keep the
/// last value they had.
struct HMsblState {
  RVector gamma;
  std::vector<CMatrix> b_mats;
  double lambda = 0.0;
  std::vector<bool> active;
  std::vector<double> cost_trace;

  Index active_count() const;
};

/// Posterior N(mu_l, Sigma_x) of the block coefficients. Only the diagonal
/// d x d blocks of Sigma_x are kept; inactive blocks are zero.
struct Posterior {
  CMatrix mu;                        // (M*d) x columns of Y
  std::vector<CMatrix> sigma_blocks;  // M blocks of d x d
};

struct Diagnostics {
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_trace;  // initial cost first, then one per iteration
  std::vector<double> iteration_seconds;
  std::vector<Index> active_counts;
  std::vector<double> lambda_trace;
};

struct SolverResult {
  HMsblState state;
  Posterior posterior;
  Diagnostics diagnostics;
};

/// Called after every completed iteration with the updated state.
using IterationObserver = std::function<void(int iteration, const HMsblState& state)>;

/// gamma = ||Y Y^H / L||_F / ||D D^H||_F for every block, B_i = I / sqrt(d).
HMsblState init_state(const SnapshotSet& y, const BlockDictionary& dict, const HMsblParams& params);

Posterior e_step(const SnapshotSet& y, const HMsblState& state, const BlockDictionary& dict);

/// Sigma_x^i + (1/L) mu^i (mu^i)^H, the second moment both M-step updates share.
CMatrix block_moment(const Posterior& post, Index block, int num_snapshots);

/// gamma_i <- tr(B_i^{-1} moment_i) / d, using the B_i currently in `state`.
/// `b_loading` is added to the diagonal of B_i only when its reciprocal
/// condition number falls below 1e-12.
RVector update_gamma(const Posterior& post, const HMsblState& state, int num_snapshots,
                     double b_loading);

/// B_i <- moment_i / gamma_i, then scaled to unit Frobenius norm. Uses the
/// gamma in `state`, which should already hold this iteration's update.
/// Inactive blocks and blocks with gamma_i <= 0 keep their previous B_i.
std::vector<CMatrix> update_b(const Posterior& post, const HMsblState& state, int num_snapshots);

/// Stabilized noise update:
/// ||Y - D mu||_F^2 / (N L) + (lambda / n) tr(P G P^H (P G P^H + lambda I)^{-1})
/// with P = dict.atoms (n rows) and G = diag(gamma). Floored at
/// 1e-12 * tr(S_y) / N.
double update_lambda(const SnapshotSet& y, const Posterior& post, const HMsblState& state,
                     const BlockDictionary& dict);

/// log det Sigma_y + tr(Sigma_y^{-1} S_y), Sigma_y = D Sigma_0 D^H + lambda I.
double ml_cost(const SnapshotSet& y, const HMsblState& state, const BlockDictionary& dict);

/// Active mask after thresholding; throws SolverError if nothing survives.
std::vector<bool> prune(const HMsblState& state, const HMsblParams& params);

/// Thin factor Y~ with Y~ Y~^H = Y Y^H and at most min(N, L) columns.
/// Keeps the effective snapshot count of the input.
SnapshotSet compress_snapshots(const SnapshotSet& y);

SolverResult run(const SnapshotSet& y, const BlockDictionary& dict, const HMsblParams& params,
                 const IterationObserver& observer = {});

}  // namespace hmsbl
