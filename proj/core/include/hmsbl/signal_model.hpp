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

#include <cstdint>
#include <optional>
#include <vector>

#include "hmsbl/types.hpp"

namespace hmsbl {

/// Uniform rectangular array with half-wavelength spacing along both axes.
struct UraConfig {
  int nx = 1;
  int ny = 1;

  int sensors() const { return nx * ny; }
  void validate() const;
};

/// Source position in direction-cosine space; feasible when u^2 + v^2 <= 1.
struct Source {
  double u = 0.0;
  double v = 0.0;

  bool feasible() const { return u * u + v * v <= 1.0; }
  friend bool operator==(const Source&, const Source&) = default;
};

struct Scene {
  std::vector<Source> sources;
  double snr_db = 20.0;
  int num_snapshots = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Measurement matrix, one snapshot per column.
///
/// Row index is nx_index * ny + ny_index, i.e. column l is vec(Ybar_l^T) with
/// the y-axis index varying fastest. `num_snapshots` is the effective L used
/// to normalize second moments; it equals y.cols() except after snapshot
/// compression, where fewer columns carry the same outer product.
struct SnapshotSet {
  CMatrix y;
  int num_snapshots = 0;

  SnapshotSet() = default;
  explicit SnapshotSet(CMatrix data)
      : y(std::move(data)), num_snapshots(static_cast<int>(y.cols())) {}
  SnapshotSet(CMatrix data, int effective_snapshots)
      : y(std::move(data)), num_snapshots(effective_snapshots) {}
};

/// Elevation theta in [0, 90] and azimuth phi in [0, 360), degrees.
Source angles_to_uv(double theta_deg, double phi_deg);

/// Per-element noise variance for unit-power sources at the given SNR.
/// +inf dB gives zero noise.
double noise_variance(double snr_db);

struct SynthesisOptions {
  /// K x L symbol matrix overriding the random draw.
  std::optional<CMatrix> symbols;
  /// Overrides the variance derived from the scene SNR.
  std::optional<double> noise_variance;
};

SnapshotSet synthesize_snapshots(const Scene& scene, const UraConfig& config,
                                 const SynthesisOptions& options = {});

/// (1/L) Y Y^H with L the effective snapshot count.
CMatrix sample_covariance(const SnapshotSet& snapshots);

}  // namespace hmsbl
