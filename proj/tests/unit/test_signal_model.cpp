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


#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "hmsbl/random.hpp"
#include "hmsbl/signal_model.hpp"
#include "oracles.hpp"

using namespace hmsbl;

TEST_CASE("angles_to_uv") {
  const Source a = angles_to_uv(0.0, 0.0);
  CHECK(a.u == 0.0);
  CHECK(a.v == 0.0);

  const Source b = angles_to_uv(90.0, 0.0);
  CHECK(b.u == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(b.v) < 1e-15);

  const double deg = oracle::kPi / 180.0;
  const Source c = angles_to_uv(30.0, 45.0);
  CHECK(std::abs(c.u - std::cos(45 * deg) * std::sin(30 * deg)) < 1e-15);
  CHECK(std::abs(c.v - std::sin(45 * deg) * std::sin(30 * deg)) < 1e-15);
  CHECK(std::abs(c.u - 0.35355339059327373) < 1e-15);

  CHECK_THROWS_AS(angles_to_uv(-1.0, 0.0), DomainError);
  CHECK_THROWS_AS(angles_to_uv(91.0, 0.0), DomainError);
  CHECK_THROWS_AS(angles_to_uv(10.0, 360.0), DomainError);
  CHECK_THROWS_AS(angles_to_uv(std::nan(""), 0.0), DomainError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.0, 90.0), ph(0.0, 360.0);
  for (int k = 0; k < 1000; ++k) {
    const Source s = angles_to_uv(th(rng), ph(rng));
    CHECK(s.u * s.u + s.v * s.v <= 1.0 + 1e-15);
  }
}

TEST_CASE("noise_variance follows the per-element SNR convention") {
  CHECK(noise_variance(20.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(noise_variance(0.0) == 1.0);
  CHECK(noise_variance(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("synthesize_snapshots: forced symbols, no noise") {
  SUBCASE("broadside source gives all ones") {
    Scene scene{{{0.0, 0.0}}, 20.0, 4, 1};
    SynthesisOptions opt;
    opt.symbols = CMatrix::Ones(1, 4);
    opt.noise_variance = 0.0;
    const SnapshotSet y = synthesize_snapshots(scene, {3, 2}, opt);
    CHECK(y.y.rows() == 6);
    CHECK(y.y.cols() == 4);
    CHECK(oracle::max_abs(y.y - CMatrix::Ones(6, 4)) == 0.0);
  }
  SUBCASE("u = 1 alternates sign along x") {
    Scene scene{{{1.0, 0.0}}, 20.0, 1, 1};
    SynthesisOptions opt;
    opt.symbols = CMatrix::Ones(1, 1);
    opt.noise_variance = 0.0;
    const SnapshotSet y = synthesize_snapshots(scene, {2, 1}, opt);
    CHECK(std::abs(y.y(0, 0) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(y.y(1, 0) - cplx(-1, 0)) < 1e-15);
  }
  SUBCASE("symbol shape is checked") {
    Scene scene{{{0.0, 0.0}}, 20.0, 3, 1};
    SynthesisOptions opt;
    opt.symbols = CMatrix::Ones(1, 2);
    CHECK_THROWS_AS(synthesize_snapshots(scene, {2, 2}, opt), ArgumentError);
  }
  SUBCASE("infeasible source is rejected") {
    Scene scene{{{0.9, 0.9}}, 20.0, 3, 1};
    CHECK_THROWS_AS(synthesize_snapshots(scene, {2, 2}), DomainError);
  }
}

TEST_CASE("synthesize_snapshots matches the dense Kronecker model") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-0.7, 0.7);
  for (int nx = 1; nx <= 5; ++nx) {
    for (int ny = 1; ny <= 5; ++ny) {
      const int k = 1 + (nx + ny) % 3;
      std::vector<double> us, vs;
      std::vector<Source> src;
      for (int i = 0; i < k; ++i) {
        us.push_back(unit(rng));
        vs.push_back(unit(rng));
        src.push_back({us.back(), vs.back()});
      }
      const int l = 3;
      const CMatrix s = oracle::random_complex(k, l, rng);
      Scene scene{src, 20.0, l, 7};
      SynthesisOptions opt;
      opt.symbols = s;
      opt.noise_variance = 0.0;
      const SnapshotSet y = synthesize_snapshots(scene, {nx, ny}, opt);

      // The grid holds exactly the sources: X is K^2 x L, nonzero only at (k, k).
      const CMatrix big = oracle::kron(oracle::steering_matrix(us, nx), oracle::steering_matrix(vs, ny));
      CMatrix x = CMatrix::Zero(k * k, l);
      for (int i = 0; i < k; ++i) x.row(i * k + i) = s.row(i);
      CHECK(oracle::max_abs(y.y - big * x) < 1e-12);

      // Elementwise evaluation of the sum of exponentials.
      for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy)
          for (int c = 0; c < l; ++c) {
            cplx acc = 0.0;
            for (int i = 0; i < k; ++i) acc += s(i, c) * std::exp(cplx(0, oracle::kPi * (ix * us[i] + iy * vs[i])));
            CHECK(std::abs(y.y(ix * ny + iy, c) - acc) < 1e-12);
          }
    }
  }
}

TEST_CASE("synthesize_snapshots is deterministic in the seed") {
  Scene scene{{{0.1, 0.2}, {-0.3, 0.4}}, 10.0, 20, 99};
  const SnapshotSet a = synthesize_snapshots(scene, {3, 3});
  const SnapshotSet b = synthesize_snapshots(scene, {3, 3});
  CHECK(a.y == b.y);
  scene.seed = 100;
  const SnapshotSet c = synthesize_snapshots(scene, {3, 3});
  CHECK(a.y != c.y);
}

TEST_CASE("noise-only snapshots have the configured variance") {
  Scene scene{{}, 3.0, 10000, 123};
  const SnapshotSet y = synthesize_snapshots(scene, {2, 2});
  const double var = y.y.squaredNorm() / static_cast<double>(y.y.size());
  CHECK(std::abs(var / noise_variance(3.0) - 1.0) < 0.05);
  CHECK(std::abs(y.y.mean()) < 0.05);
}

TEST_CASE("sample_covariance") {
  SUBCASE("basis snapshot") {
    CMatrix y = CMatrix::Zero(4, 1);
    y(0, 0) = 1.0;
    const CMatrix s = sample_covariance(SnapshotSet(y));
    CMatrix e = CMatrix::Zero(4, 4);
    e(0, 0) = 1.0;
    CHECK(oracle::max_abs(s - e) == 0.0);
  }
  SUBCASE("zero data") {
    CHECK(oracle::max_abs(sample_covariance(SnapshotSet(CMatrix::Zero(3, 5)))) == 0.0);
  }
  SUBCASE("double-loop oracle, Hermitian, PSD") {
    std::mt19937_64 rng(3);
    const CMatrix y = oracle::random_complex(4, 3, rng);
    const CMatrix s = sample_covariance(SnapshotSet(y));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        cplx acc = 0.0;
        for (int l = 0; l < 3; ++l) acc += y(i, l) * std::conj(y(j, l));
        CHECK(std::abs(s(i, j) - acc / 3.0) < 1e-13);
      }
    CHECK(oracle::max_abs(s - s.adjoint()) < 1e-14);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(s);
    CHECK(eig.eigenvalues().minCoeff() > -1e-12);
  }
  SUBCASE("effective snapshot count normalizes") {
    const CMatrix y = CMatrix::Ones(2, 2);
    CHECK(std::abs(sample_covariance(SnapshotSet(y, 4))(0, 0) - cplx(0.5, 0)) < 1e-15);
  }
}

TEST_CASE("substreams are distinct and reproducible") {
  std::set<std::uint64_t> seen;
  for (auto s : {Stream::symbols, Stream::noise, Stream::scene, Stream::trial})
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(42, s, i));
  CHECK(seen.size() == 200);
  CHECK(derive_seed(42, Stream::noise, 3) == derive_seed(42, Stream::noise, 3));
  auto a = make_engine(1, Stream::scene, 2);
  auto b = make_engine(1, Stream::scene, 2);
  CHECK(a() == b());
}

TEST_CASE("config invariants") {
  CHECK_THROWS_AS((UraConfig{0, 2}.validate()), ArgumentError);
  CHECK_NOTHROW((UraConfig{1, 1}.validate()));
  CHECK_THROWS_AS((Scene{{}, 20.0, 1, 0}.validate()), ArgumentError);
  CHECK_THROWS_AS((Scene{{{0.0, 0.0}}, 20.0, 0, 0}.validate()), ArgumentError);
  CHECK_THROWS_AS((Scene{{{1.0, 0.5}}, 20.0, 1, 0}.validate()), DomainError);
}
