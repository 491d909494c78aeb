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


#include "hmsbl/v_extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

namespace hmsbl {

namespace {

std::vector<Index> order_desc(const RVector& gamma, std::vector<Index> idx) {
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return gamma(a) > gamma(b); });
  return idx;
}

// Roots of sum_m coeffs[m] z^m via the companion matrix.
std::vector<cplx> polynomial_roots(std::vector<cplx> coeffs) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  const double tiny = scale * 64.0 * std::numeric_limits<double>::epsilon();
  while (!coeffs.empty() && std::abs(coeffs.back()) <= tiny) coeffs.pop_back();
  std::size_t zeros = 0;
  while (zeros < coeffs.size() && std::abs(coeffs[zeros]) <= tiny) ++zeros;
  coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(zeros));

  std::vector<cplx> roots(zeros, cplx(0.0, 0.0));
  if (coeffs.size() < 2) return roots;
  const Index deg = static_cast<Index>(coeffs.size()) - 1;
  CMatrix companion = CMatrix::Zero(deg, deg);
  for (Index j = 0; j < deg; ++j) companion(0, j) = -coeffs[static_cast<std::size_t>(deg - 1 - j)] / coeffs.back();
  for (Index j = 1; j < deg; ++j) companion(j, j - 1) = 1.0;
  Eigen::ComplexEigenSolver<CMatrix> eig(companion, false);
  if (eig.info() != Eigen::Success) throw SolverError("root-MUSIC: polynomial rooting failed");
  for (Index j = 0; j < deg; ++j) roots.push_back(eig.eigenvalues()(j));
  return roots;
}

struct RootPair {
  cplx rep;
  double distance;  // | 1 - |rep| |
};

// Reflect every root into the closed unit disk and merge nearest neighbours.
std::vector<RootPair> merge_reciprocal_pairs(const std::vector<cplx>& roots) {
  std::vector<cplx> inside;
  inside.reserve(roots.size());
  for (const auto& r : roots) {
    const double mag = std::abs(r);
    inside.push_back(mag > 1.0 ? r / (mag * mag) : r);
  }
  std::vector<std::size_t> order(inside.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(1.0 - std::abs(inside[a])) < std::abs(1.0 - std::abs(inside[b]));
  });

  std::vector<bool> used(inside.size(), false);
  std::vector<RootPair> pairs;
  for (const std::size_t a : order) {
    if (used[a]) continue;
    used[a] = true;
    std::size_t best = inside.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < inside.size(); ++b) {
      if (used[b]) continue;
      const double dist = std::abs(inside[a] - inside[b]);
      if (dist < best_dist) {
        best_dist = dist;
        best = b;
      }
    }
    cplx rep = inside[a];
    if (best < inside.size()) {
      used[best] = true;
      rep = 0.5 * (inside[a] + inside[best]);
    }
    pairs.push_back({rep, std::abs(1.0 - std::abs(rep))});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const RootPair& x, const RootPair& y) { return x.distance < y.distance; });
  return pairs;
}

}  // namespace

PeakSelection select_peaks(const RVector& gamma, int k_peaks) {
  if (k_peaks < 1) throw ArgumentError("select_peaks needs k >= 1");
  const Index m = gamma.size();
  if (m < k_peaks) throw ArgumentError("select_peaks: fewer grid points than requested peaks");

  std::vector<Index> maxima;
  for (Index i = 0; i < m; ++i) {
    const bool left = i == 0 || gamma(i) > gamma(i - 1);
    const bool right = i == m - 1 || gamma(i) > gamma(i + 1);
    if (left && right && m > 1) maxima.push_back(i);
  }
  if (m == 1) maxima.push_back(0);

  PeakSelection out;
  if (static_cast<Index>(maxima.size()) >= k_peaks) {
    out.indices = order_desc(gamma, std::move(maxima));
  } else {
    std::vector<Index> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), Index{0});
    out.indices = order_desc(gamma, std::move(all));
    out.fallback = true;
  }
  out.indices.resize(static_cast<std::size_t>(k_peaks));
  return out;
}

RootMusicResult root_music_v(const CMatrix& b, int k, double gap_threshold) {
  const Index n = b.rows();
  if (b.cols() != n) throw ArgumentError("root-MUSIC needs a square matrix");
  if (k < 1 || k >= n) {
    throw ArgumentError("root-MUSIC needs 1 <= k <= n - 1 (k=" + std::to_string(k) +
                        ", n=" + std::to_string(n) + ")");
  }

  const CMatrix herm = 0.5 * (b + b.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  if (eig.info() != Eigen::Success) throw SolverError("root-MUSIC: eigendecomposition failed");
  const RVector& lam = eig.eigenvalues();  // ascending
  const Index noise_dim = n - k;

  RootMusicResult res;
  const double top = std::max(std::abs(lam(n - 1)), std::numeric_limits<double>::min());
  res.eigen_gap = (lam(noise_dim) - lam(noise_dim - 1)) / top;
  res.low_confidence = res.eigen_gap < gap_threshold;

  const CMatrix noise = eig.eigenvectors().leftCols(noise_dim);
  const CMatrix proj = noise * noise.adjoint();

  // coefficient of z^(o + n - 1) is sum_i proj(i, i + o), o in [-(n-1), n-1]
  std::vector<cplx> coeffs(static_cast<std::size_t>(2 * n - 1), cplx(0.0, 0.0));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) coeffs[static_cast<std::size_t>(j - i + n - 1)] += proj(i, j);
  }

  res.roots = polynomial_roots(coeffs);
  const auto pairs = merge_reciprocal_pairs(res.roots);
  if (static_cast<int>(pairs.size()) < k) {
    throw SolverError("root-MUSIC: polynomial has fewer than k root pairs");
  }
  for (int j = 0; j < k; ++j) {
    const cplx r = pairs[static_cast<std::size_t>(j)].rep;
    res.selected_roots.push_back(r);
    res.v.push_back(std::clamp(std::arg(r) / std::numbers::pi, -1.0, 1.0));
  }
  return res;
}

int PeakAllocation::total() const {
  int t = 0;
  for (const auto& e : entries) t += e.second;
  return t;
}

void PeakAllocation::validate(int ny) const {
  std::set<Index> seen;
  for (const auto& [block, count] : entries) {
    if (count < 1 || count > ny - 1) {
      throw ArgumentError("block " + std::to_string(block) + " allocated " + std::to_string(count) +
                          " sources; need 1 <= k_i <= ny - 1 = " + std::to_string(ny - 1));
    }
    if (!seen.insert(block).second) {
      throw ArgumentError("block " + std::to_string(block) + " allocated twice");
    }
  }
}

PeakAllocation allocate_peaks(const PeakSelection& peaks, const std::vector<int>& counts) {
  if (counts.size() != peaks.indices.size()) {
    throw ArgumentError("allocation needs one count per selected peak");
  }
  PeakAllocation alloc;
  for (std::size_t j = 0; j < counts.size(); ++j) alloc.entries.emplace_back(peaks.indices[j], counts[j]);
  return alloc;
}

PeakAllocation auto_allocate(const HMsblState& state, const PeakSelection& peaks, double ratio) {
  PeakAllocation alloc;
  for (const Index i : peaks.indices) {
    const CMatrix& b = state.b_mats[static_cast<std::size_t>(i)];
    const Index n = b.rows();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (b + b.adjoint()), Eigen::EigenvaluesOnly);
    const RVector& lam = eig.eigenvalues();
    const double cut = ratio * lam(n - 1);
    int count = 0;
    for (Index j = 0; j < n; ++j) count += lam(j) >= cut ? 1 : 0;
    const int upper = std::max(1, static_cast<int>(n) - 1);
    alloc.entries.emplace_back(i, std::clamp(count, 1, upper));
  }
  return alloc;
}

std::vector<Source> PairedEstimates::sources() const {
  std::vector<Source> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({p.u, p.v});
  return out;
}

PairedEstimates pair_estimates(const HMsblState& state, const Grid1D& grid_u,
                               const PeakAllocation& alloc) {
  if (state.b_mats.empty()) throw ArgumentError("pair_estimates: empty state");
  if (grid_u.size() != static_cast<Index>(state.b_mats.size())) {
    throw ArgumentError("pair_estimates: grid size does not match block count");
  }
  const int ny = static_cast<int>(state.b_mats.front().rows());
  alloc.validate(ny);

  PairedEstimates out;
  for (const auto& [block, count] : alloc.entries) {
    if (block < 0 || block >= grid_u.size()) throw ArgumentError("allocation block out of range");
    if (!state.active[static_cast<std::size_t>(block)]) {
      throw ArgumentError("allocation references pruned block " + std::to_string(block));
    }
    const auto rm = root_music_v(state.b_mats[static_cast<std::size_t>(block)], count);
    for (const double v : rm.v) {
      out.pairs.push_back({grid_u[block], v, block, rm.eigen_gap, rm.low_confidence});
    }
  }
  return out;
}

}  // namespace hmsbl
