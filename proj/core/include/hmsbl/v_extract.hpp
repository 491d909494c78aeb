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

#include <utility>
#include <vector>

#include "hmsbl/dictionary.hpp"
#include "hmsbl/solver.hpp"

namespace hmsbl {

struct PeakSelection {
  std::vector<Index> indices;  // descending by gamma
  bool fallback = false;       // fewer local maxima than requested; top values used instead
};

/// The k largest strict local maxima of gamma (endpoints compare against
/// their single neighbour), descending by value, ties to the lower index.
PeakSelection select_peaks(const RVector& gamma, int k_peaks);

struct RootMusicResult {
  std::vector<double> v;            // k estimates in [-1, 1]
  std::vector<cplx> selected_roots;  // one representative per selected root pair
  std::vector<cplx> roots;          // all polynomial roots, unreflected
  double eigen_gap = 0.0;           // (lambda_signal_min - lambda_noise_max) / lambda_max
  bool low_confidence = false;
};

inline constexpr double kDefaultEigenGapThreshold = 1e-3;

/// Root-MUSIC on a learned block correlation matrix.
///
/// The noise subspace is spanned by the eigenvectors of the n - k smallest
/// eigenvalues of b; with C its projector, the spectrum a(z)^H C a(z) is the
/// Laurent polynomial sum_o (sum_i C[i, i+o]) z^o. Its roots come in pairs
/// (r, 1/conj(r)); each pair is reflected inside the unit circle and merged,
/// and the k pairs closest to the circle give v = arg(r) / pi.
RootMusicResult root_music_v(const CMatrix& b, int k,
                             double gap_threshold = kDefaultEigenGapThreshold);

/// Number of sources attributed to each selected u-block.
struct PeakAllocation {
  std::vector<std::pair<Index, int>> entries;  // (block index, k_i)

  int total() const;
  /// k_i in [1, ny - 1] and distinct blocks.
  void validate(int ny) const;
};

/// Pairs peaks (in selection order) with the given per-peak counts.
PeakAllocation allocate_peaks(const PeakSelection& peaks, const std::vector<int>& counts);

/// Diagnostic allocator: k_i is the number of eigenvalues of B_i above
/// `ratio` times the largest, clamped to [1, ny - 1].
PeakAllocation auto_allocate(const HMsblState& state, const PeakSelection& peaks,
                             double ratio = 0.1);

struct PairedEstimate {
  double u = 0.0;
  double v = 0.0;
  Index block = -1;
  double eigen_gap = 0.0;
  bool low_confidence = false;
};

struct PairedEstimates {
  std::vector<PairedEstimate> pairs;

  std::vector<Source> sources() const;
};

PairedEstimates pair_estimates(const HMsblState& state, const Grid1D& grid_u,
                               const PeakAllocation& alloc);

}  // namespace hmsbl
