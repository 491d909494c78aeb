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


#include "hmsbl/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hmsbl/random.hpp"

namespace hmsbl {

void UraConfig::validate() const {
  if (nx < 1 || ny < 1) {
    throw ArgumentError("array dimensions must be positive, got nx=" + std::to_string(nx) +
                        " ny=" + std::to_string(ny));
  }
}

void Scene::validate() const {
  if (sources.empty()) throw ArgumentError("scene needs at least one source");
  if (num_snapshots < 1) throw ArgumentError("scene needs at least one snapshot");
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const auto& s = sources[k];
    if (!std::isfinite(s.u) || !std::isfinite(s.v) || !s.feasible()) {
      throw DomainError("source " + std::to_string(k) + " violates u^2 + v^2 <= 1");
    }
  }
}

Source angles_to_uv(double theta_deg, double phi_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) {
    throw DomainError("elevation must lie in [0, 90] degrees");
  }
  if (!(phi_deg >= 0.0 && phi_deg < 360.0)) {
    throw DomainError("azimuth must lie in [0, 360) degrees");
  }
  constexpr double deg = std::numbers::pi / 180.0;
  const double st = std::sin(theta_deg * deg);
  return {std::cos(phi_deg * deg) * st, std::sin(phi_deg * deg) * st};
}

double noise_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

namespace {

// Zero-mean, unit-variance circular complex Gaussian.
CMatrix circular_gaussian(Index rows, Index cols, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix out(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      const double re = normal(engine);
      const double im = normal(engine);
      out(r, c) = {re, im};
    }
  }
  return out;
}

}  // namespace

SnapshotSet synthesize_snapshots(const Scene& scene, const UraConfig& config,
                                 const SynthesisOptions& options) {
  config.validate();
  if (scene.num_snapshots < 1) throw ArgumentError("scene needs at least one snapshot");
  // K = 0 is allowed here (pure noise); Scene::validate still demands K >= 1.
  for (const auto& s : scene.sources) {
    if (!s.feasible()) throw DomainError("source violates u^2 + v^2 <= 1");
  }

  const Index num_sources = static_cast<Index>(scene.sources.size());
  const Index snapshots = scene.num_snapshots;

  CMatrix symbols;
  if (options.symbols) {
    symbols = *options.symbols;
    if (symbols.rows() != num_sources || symbols.cols() != snapshots) {
      throw ArgumentError("symbol override must be K x L");
    }
  } else {
    auto engine = make_engine(scene.seed, Stream::symbols);
    symbols = circular_gaussian(num_sources, snapshots, engine);
  }

  // Each source contributes the separable response exp(j pi (nx u + ny v)).
  const Index n = config.sensors();
  CMatrix response(n, num_sources);
  for (Index k = 0; k < num_sources; ++k) {
    const auto& s = scene.sources[static_cast<std::size_t>(k)];
    for (int ix = 0; ix < config.nx; ++ix) {
      for (int iy = 0; iy < config.ny; ++iy) {
        const double phase = std::numbers::pi * (ix * s.u + iy * s.v);
        response(ix * config.ny + iy, k) = std::polar(1.0, phase);
      }
    }
  }

  CMatrix y = response * symbols;

  const double sigma2 = options.noise_variance.value_or(noise_variance(scene.snr_db));
  if (sigma2 < 0.0 || !std::isfinite(sigma2)) throw ArgumentError("noise variance must be finite and >= 0");
  if (sigma2 > 0.0) {
    auto engine = make_engine(scene.seed, Stream::noise);
    y += std::sqrt(sigma2) * circular_gaussian(n, snapshots, engine);
  }
  return SnapshotSet(std::move(y));
}

CMatrix sample_covariance(const SnapshotSet& snapshots) {
  if (snapshots.num_snapshots < 1) throw ArgumentError("sample covariance needs L >= 1");
  CMatrix s = snapshots.y * snapshots.y.adjoint();
  s /= static_cast<double>(snapshots.num_snapshots);
  // Symmetrize away rounding so downstream Hermitian solvers see exact symmetry.
  return 0.5 * (s + s.adjoint());
}

}  // namespace hmsbl
