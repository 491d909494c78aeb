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


#include "hmsbl/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace hmsbl {

void HMsblParams::validate() const {
  if (max_iters < 0) throw ArgumentError("max_iters must be >= 0");
  if (!(prune_tol > 0.0)) throw ArgumentError("prune_tol must be > 0");
  if (!(b_loading >= 0.0)) throw ArgumentError("b_loading must be >= 0");
  if (!(cost_tol >= 0.0)) throw ArgumentError("cost_tol must be >= 0");
  if (noise.mode == NoiseMode::fixed && !(noise.value > 0.0 && std::isfinite(noise.value))) {
    throw ArgumentError("fixed noise variance must be positive and finite");
  }
}

Index HMsblState::active_count() const {
  return static_cast<Index>(std::count(active.begin(), active.end(), true));
}

namespace {

constexpr double kSingularRcond = 1e-12;

std::vector<Index> active_indices(const HMsblState& state) {
  std::vector<Index> idx;
  for (Index i = 0; i < static_cast<Index>(state.active.size()); ++i) {
    if (state.active[static_cast<std::size_t>(i)] && state.gamma(i) > 0.0) idx.push_back(i);
  }
  return idx;
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

void check_shapes(const SnapshotSet& y, const HMsblState& state, const BlockDictionary& dict) {
  if (y.y.rows() != dict.rows()) throw ArgumentError("snapshot rows do not match dictionary rows");
  if (state.gamma.size() != dict.blocks() ||
      static_cast<Index>(state.b_mats.size()) != dict.blocks() ||
      static_cast<Index>(state.active.size()) != dict.blocks()) {
    throw ArgumentError("state size does not match dictionary block count");
  }
  if (y.num_snapshots < 1) throw ArgumentError("snapshot set needs L >= 1");
}

// Sigma_y = lambda I + sum_i gamma_i (a_i a_i^H) kron B_i, factored once and
// shared by the E-step and the cost.
struct Evidence {
  std::vector<Index> active;
  CMatrix sigma_y;
  Eigen::LLT<CMatrix> llt;
  CMatrix inverse;

  Evidence(const HMsblState& state, const BlockDictionary& dict, int iteration = -1)
      : active(active_indices(state)) {
    if (!(state.lambda > 0.0)) throw SolverError("noise variance must be positive", iteration);
    const Index n = dict.atoms.rows();
    const Index d = dict.block_size;
    const Index rows = n * d;
    sigma_y = CMatrix::Zero(rows, rows);
    if (d == 1) {
      CMatrix scaled(n, static_cast<Index>(active.size()));
      CMatrix sub(n, static_cast<Index>(active.size()));
      for (Index j = 0; j < static_cast<Index>(active.size()); ++j) {
        const Index i = active[static_cast<std::size_t>(j)];
        sub.col(j) = dict.atoms.col(i);
        scaled.col(j) = state.gamma(i) * dict.atoms.col(i);
      }
      sigma_y.noalias() = scaled * sub.adjoint();
    } else {
      for (const Index i : active) {
        const auto a = dict.atoms.col(i);
        const CMatrix b = state.gamma(i) * state.b_mats[static_cast<std::size_t>(i)];
        for (Index q = 0; q < n; ++q) {
          for (Index p = 0; p < n; ++p) {
            sigma_y.block(p * d, q * d, d, d) += (a(p) * std::conj(a(q))) * b;
          }
        }
      }
    }
    sigma_y = hermitian_part(sigma_y);
    sigma_y.diagonal().array() += state.lambda;
    llt.compute(sigma_y);
    if (llt.info() != Eigen::Success) {
      throw SolverError("data covariance is not positive definite", iteration);
    }
    inverse = llt.solve(CMatrix::Identity(rows, rows));
    inverse = hermitian_part(inverse);
  }

  double log_det() const {
    const auto diag = llt.matrixLLT().diagonal();
    double s = 0.0;
    for (Index k = 0; k < diag.size(); ++k) s += std::log(diag(k).real());
    return 2.0 * s;
  }

  double cost(const SnapshotSet& y, int iteration = -1) const {
    const CMatrix wy = inverse * y.y;
    const double fit = (y.y.conjugate().cwiseProduct(wy)).sum().real() / y.num_snapshots;
    const double c = log_det() + fit;
    if (!std::isfinite(c)) throw SolverError("non-finite likelihood cost", iteration);
    return c;
  }

  Posterior posterior(const SnapshotSet& y, const HMsblState& state,
                      const BlockDictionary& dict) const {
    const Index n = dict.atoms.rows();
    const Index d = dict.block_size;
    const Index m = dict.blocks();
    const Index na = static_cast<Index>(active.size());

    Posterior post;
    post.mu = CMatrix::Zero(m * d, y.y.cols());
    post.sigma_blocks.assign(static_cast<std::size_t>(m), CMatrix::Zero(d, d));
    if (na == 0) return post;

    BlockDictionary sub{CMatrix(n, na), dict.block_size};
    for (Index j = 0; j < na; ++j) sub.atoms.col(j) = dict.atoms.col(active[static_cast<std::size_t>(j)]);

    // H = D_a^H W Y and T = D_a^H W; block j of T against column block p of D
    // gives the d x d pieces of D_i^H W D_i.
    const CMatrix h = sub.apply_adjoint(inverse * y.y);
    const CMatrix t = sub.apply_adjoint(inverse);

    for (Index j = 0; j < na; ++j) {
      const Index i = active[static_cast<std::size_t>(j)];
      const CMatrix r = state.gamma(i) * state.b_mats[static_cast<std::size_t>(i)];
      CMatrix g = CMatrix::Zero(d, d);
      for (Index p = 0; p < n; ++p) g += sub.atoms(p, j) * t.block(j * d, p * d, d, d);
      post.sigma_blocks[static_cast<std::size_t>(i)] = hermitian_part(r - r * g * r);
      post.mu.middleRows(i * d, d) = r * h.middleRows(j * d, d);
    }
    return post;
  }
};

double trace_scale(const SnapshotSet& y) {
  return y.y.squaredNorm() / (static_cast<double>(y.num_snapshots) * static_cast<double>(y.y.rows()));
}

}  // namespace

HMsblState init_state(const SnapshotSet& y, const BlockDictionary& dict, const HMsblParams& params) {
  params.validate();
  if (y.y.rows() != dict.rows()) throw ArgumentError("snapshot rows do not match dictionary rows");
  if (y.num_snapshots < 1) throw ArgumentError("snapshot set needs L >= 1");
  const CMatrix s = sample_covariance(y);
  const double s_norm = s.norm();
  if (!(s_norm > 0.0)) throw DegenerateInputError("cannot initialize from all-zero snapshots");
  const double d_norm = dict.gram_frobenius();
  if (!(d_norm > 0.0)) throw DegenerateInputError("dictionary is empty or zero");

  const Index m = dict.blocks();
  const Index d = dict.block_size;
  HMsblState state;
  state.gamma = RVector::Constant(m, s_norm / d_norm);
  state.b_mats.assign(static_cast<std::size_t>(m),
                      CMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  state.active.assign(static_cast<std::size_t>(m), true);
  state.lambda = params.noise.mode == NoiseMode::fixed ? params.noise.value
                                                       : 0.01 * trace_scale(y);
  return state;
}

Posterior e_step(const SnapshotSet& y, const HMsblState& state, const BlockDictionary& dict) {
  check_shapes(y, state, dict);
  return Evidence(state, dict).posterior(y, state, dict);
}

CMatrix block_moment(const Posterior& post, Index block, int num_snapshots) {
  const auto& sigma = post.sigma_blocks[static_cast<std::size_t>(block)];
  const Index d = sigma.rows();
  const auto mu = post.mu.middleRows(block * d, d);
  CMatrix m = sigma + (mu * mu.adjoint()) / static_cast<double>(num_snapshots);
  return hermitian_part(m);
}

RVector update_gamma(const Posterior& post, const HMsblState& state, int num_snapshots,
                     double b_loading) {
  RVector gamma = state.gamma;
  for (Index i = 0; i < gamma.size(); ++i) {
    if (!state.active[static_cast<std::size_t>(i)]) {
      gamma(i) = 0.0;
      continue;
    }
    const CMatrix moment = block_moment(post, i, num_snapshots);
    const Index d = moment.rows();
    CMatrix b = state.b_mats[static_cast<std::size_t>(i)];
    Eigen::LLT<CMatrix> llt(b);
    if (llt.info() != Eigen::Success || llt.rcond() < kSingularRcond) {
      b.diagonal().array() += b_loading;
      llt.compute(b);
    }
    if (llt.info() != Eigen::Success) {
      throw SolverError("correlation matrix of block " + std::to_string(i) + " is singular");
    }
    const double value = llt.solve(moment).trace().real() / static_cast<double>(d);
    gamma(i) = std::max(0.0, value);
  }
  return gamma;
}

std::vector<CMatrix> update_b(const Posterior& post, const HMsblState& state, int num_snapshots) {
  std::vector<CMatrix> b = state.b_mats;
  for (Index i = 0; i < state.gamma.size(); ++i) {
    if (!state.active[static_cast<std::size_t>(i)] || !(state.gamma(i) > 0.0)) continue;
    CMatrix next = block_moment(post, i, num_snapshots) / state.gamma(i);
    const double norm = next.norm();
    if (!(norm > 0.0)) continue;
    b[static_cast<std::size_t>(i)] = next / norm;
  }
  return b;
}

double update_lambda(const SnapshotSet& y, const Posterior& post, const HMsblState& state,
                     const BlockDictionary& dict) {
  check_shapes(y, state, dict);
  const double rows = static_cast<double>(dict.rows());
  const double residual =
      (y.y - dict.apply(post.mu)).squaredNorm() / (rows * static_cast<double>(y.num_snapshots));

  const Index n = dict.atoms.rows();
  RVector g = state.gamma;
  for (Index i = 0; i < g.size(); ++i) {
    if (!state.active[static_cast<std::size_t>(i)]) g(i) = 0.0;
  }
  const CMatrix pgp = hermitian_part(dict.atoms * g.asDiagonal() * dict.atoms.adjoint());
  CMatrix shifted = pgp;
  shifted.diagonal().array() += state.lambda;
  Eigen::LLT<CMatrix> llt(shifted);
  if (llt.info() != Eigen::Success) throw SolverError("noise update: shifted Gram matrix not PD");
  const double tr = llt.solve(pgp).trace().real();
  const double updated = residual + state.lambda / static_cast<double>(n) * tr;

  const double floor = 1e-12 * trace_scale(y);
  return std::max(updated, floor);
}

double ml_cost(const SnapshotSet& y, const HMsblState& state, const BlockDictionary& dict) {
  check_shapes(y, state, dict);
  return Evidence(state, dict).cost(y);
}

std::vector<bool> prune(const HMsblState& state, const HMsblParams& params) {
  std::vector<bool> active = state.active;
  if (params.prune_mode == PruneMode::off) return active;

  double peak = 0.0;
  for (Index i = 0; i < state.gamma.size(); ++i) {
    if (active[static_cast<std::size_t>(i)]) peak = std::max(peak, state.gamma(i));
  }
  const double threshold =
      params.prune_mode == PruneMode::relative ? params.prune_tol * peak : params.prune_tol;
  bool any = false;
  for (Index i = 0; i < state.gamma.size(); ++i) {
    auto&& flag = active[static_cast<std::size_t>(i)];
    if (flag && (state.gamma(i) < threshold || !(state.gamma(i) > 0.0))) flag = false;
    any = any || flag;
  }
  if (!any) throw SolverError("all blocks pruned; degenerate fit");
  return active;
}

SnapshotSet compress_snapshots(const SnapshotSet& y) {
  const Index rows = y.y.rows();
  const Index cols = y.y.cols();
  if (y.num_snapshots < 1 || cols < 1) throw ArgumentError("compression needs L >= 1");
  if (cols <= rows) return y;
  if (y.y.squaredNorm() == 0.0) return SnapshotSet(CMatrix::Zero(rows, 1), y.num_snapshots);

  const CMatrix outer = hermitian_part(y.y * y.y.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(outer);
  if (eig.info() != Eigen::Success) throw SolverError("eigendecomposition of Y Y^H failed");
  const RVector& values = eig.eigenvalues();  // ascending
  const double cutoff =
      values(rows - 1) * static_cast<double>(rows) * std::numeric_limits<double>::epsilon();
  Index rank = 0;
  for (Index k = 0; k < rows; ++k) rank += values(k) > cutoff ? 1 : 0;
  rank = std::max<Index>(rank, 1);

  CMatrix thin(rows, rank);
  for (Index k = 0; k < rank; ++k) {
    const Index src = rows - 1 - k;
    thin.col(k) = eig.eigenvectors().col(src) * std::sqrt(std::max(values(src), 0.0));
  }
  return SnapshotSet(std::move(thin), y.num_snapshots);
}

SolverResult run(const SnapshotSet& input, const BlockDictionary& dict, const HMsblParams& params,
                 const IterationObserver& observer) {
  params.validate();
  const SnapshotSet y = params.compress ? compress_snapshots(input) : input;
  const int num_snapshots = y.num_snapshots;

  SolverResult result;
  HMsblState& state = result.state;
  Diagnostics& diag = result.diagnostics;
  state = init_state(y, dict, params);

  auto evidence = std::make_unique<Evidence>(state, dict);
  state.cost_trace.push_back(evidence->cost(y));
  diag.lambda_trace.push_back(state.lambda);

  using clock = std::chrono::steady_clock;
  for (int it = 1; it <= params.max_iters; ++it) {
    const auto start = clock::now();

    const Posterior post = evidence->posterior(y, state, dict);

    state.gamma = update_gamma(post, state, num_snapshots, params.b_loading);
    for (Index i = 0; i < state.gamma.size(); ++i) {
      if (state.active[static_cast<std::size_t>(i)] && !(state.gamma(i) > 0.0)) {
        state.active[static_cast<std::size_t>(i)] = false;
      }
    }
    state.b_mats = update_b(post, state, num_snapshots);

    if (params.noise.mode == NoiseMode::adaptive) {
      state.lambda = update_lambda(y, post, state, dict);
    }

    try {
      state.active = prune(state, params);
    } catch (const SolverError& e) {
      throw SolverError(e.what(), it);
    }
    for (Index i = 0; i < state.gamma.size(); ++i) {
      if (!state.active[static_cast<std::size_t>(i)]) state.gamma(i) = 0.0;
    }

    evidence = std::make_unique<Evidence>(state, dict, it);
    const double cost = evidence->cost(y, it);
    const double previous = state.cost_trace.back();
    state.cost_trace.push_back(cost);

    diag.iteration_seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
    diag.active_counts.push_back(state.active_count());
    diag.lambda_trace.push_back(state.lambda);
    diag.iterations = it;
    if (observer) observer(it, state);

    if (params.cost_tol > 0.0 &&
        std::abs(cost - previous) / std::max(1.0, std::abs(previous)) < params.cost_tol) {
      diag.converged = true;
      break;
    }
  }

  result.posterior = evidence->posterior(y, state, dict);
  diag.cost_trace = state.cost_trace;
  return result;
}

}  // namespace hmsbl
