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

#include <algorithm>
#include <set>

#include "hmsbl/v_extract.hpp"
#include "oracles.hpp"

using namespace hmsbl;

namespace {

CMatrix covariance_of(const std::vector<double>& vs, Index n) {
  const CMatrix a = oracle::steering_matrix(vs, n);
  return a * a.adjoint();
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("select_peaks") {
  CHECK(select_peaks(RVector{{0, 1, 0, 2, 0}}, 2).indices == std::vector<Index>{3, 1});

  RVector hot = RVector::Zero(7);
  hot(5) = 1.0;
  const PeakSelection one = select_peaks(hot, 1);
  CHECK(one.indices == std::vector<Index>{5});
  CHECK_FALSE(one.fallback);

  // Endpoints count against their single neighbour.
  CHECK(select_peaks(RVector{{3, 1, 2}}, 2).indices == std::vector<Index>{0, 2});

  // Ties between maxima go to the lower index.
  CHECK(select_peaks(RVector{{0, 2, 0, 2, 0}}, 2).indices == std::vector<Index>{1, 3});

  // A plateau has no strict maximum: fall back to top values.
  const PeakSelection flat = select_peaks(RVector{{1, 1, 1, 1}}, 2);
  CHECK(flat.fallback);
  CHECK(flat.indices == std::vector<Index>{0, 1});

  CHECK_THROWS_AS(select_peaks(RVector{{1, 2}}, 0), ArgumentError);
  CHECK_THROWS_AS(select_peaks(RVector{{1, 2}}, 3), ArgumentError);
}

TEST_CASE("select_peaks matches an exhaustive neighbour scan") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(5.0, 195.0), amp(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    RVector g = RVector::Constant(200, 0.01);
    for (int p = 0; p < 6; ++p) {
      const double c = pos(rng), a = amp(rng);
      for (Index i = 0; i < 200; ++i) g(i) += a * std::exp(-0.5 * std::pow((i - c) / 2.0, 2));
    }
    std::vector<std::pair<double, Index>> maxima;
    for (Index i = 0; i < 200; ++i) {
      const bool l = i == 0 || g(i) > g(i - 1);
      const bool r = i == 199 || g(i) > g(i + 1);
      if (l && r) maxima.push_back({-g(i), i});
    }
    std::sort(maxima.begin(), maxima.end());
    const int k = std::min<int>(3, static_cast<int>(maxima.size()));
    const PeakSelection sel = select_peaks(g, k);
    for (int j = 0; j < k; ++j) CHECK(sel.indices[j] == maxima[j].second);
    CHECK(select_peaks(7.5 * g, k).indices == sel.indices);
  }
}

TEST_CASE("root_music_v") {
  SUBCASE("broadside source") {
    const CMatrix b = covariance_of({0.0}, 4) + 1e-9 * CMatrix::Identity(4, 4);
    const RootMusicResult r = root_music_v(b, 1);
    REQUIRE(r.v.size() == 1);
    CHECK(std::abs(r.v[0]) < 1e-6);
    CHECK_FALSE(r.low_confidence);
  }
  SUBCASE("two exact sources") {
    const RootMusicResult r = root_music_v(covariance_of({-0.5, 0.3}, 6), 2);
    const auto v = sorted(r.v);
    CHECK(std::abs(v[0] + 0.5) < 1e-6);
    CHECK(std::abs(v[1] - 0.3) < 1e-6);
  }
  SUBCASE("flat spectrum is flagged") {
    const RootMusicResult r = root_music_v(CMatrix::Identity(4, 4), 1);
    CHECK(r.low_confidence);
    CHECK(r.eigen_gap < 1e-12);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS_AS(root_music_v(CMatrix::Identity(4, 4), 4), ArgumentError);
    CHECK_THROWS_AS(root_music_v(CMatrix::Identity(4, 4), 0), ArgumentError);
    CHECK_THROWS_AS(root_music_v(CMatrix::Identity(4, 3), 1), ArgumentError);
  }
  SUBCASE("endpoint frequency") {
    const RootMusicResult r = root_music_v(covariance_of({-1.0, 0.2}, 5), 2);
    const auto v = sorted(r.v);
    CHECK(std::abs(std::abs(v[0]) - 1.0) < 1e-6);
    CHECK(std::abs(v[1] - 0.2) < 1e-6);
  }
}

TEST_CASE("root_music_v noiseless exactness over random sets") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = trial % 2 ? 6 : 4;
    const int k = 1 + trial % static_cast<int>(n - 1);
    std::vector<double> vs;
    while (static_cast<int>(vs.size()) < k) {
      const double c = u(rng);
      if (std::all_of(vs.begin(), vs.end(), [&](double x) { return std::abs(x - c) >= 0.05; })) vs.push_back(c);
    }
    const auto got = sorted(root_music_v(covariance_of(vs, n), k).v);
    const auto want = sorted(vs);
    for (int j = 0; j < k; ++j) CHECK(std::abs(got[j] - want[j]) < 1e-6);
  }
}

TEST_CASE("root_music_v polynomial roots come in conjugate-reciprocal pairs") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = oracle::random_complex(5, 5, rng);
    const RootMusicResult r = root_music_v(a * a.adjoint(), 2);
    REQUIRE(r.roots.size() == 8);
    for (const cplx& z : r.roots) {
      const cplx mirror = 1.0 / std::conj(z);
      double best = 1e300;
      for (const cplx& w : r.roots) best = std::min(best, std::abs(w - mirror) / std::max(1.0, std::abs(mirror)));
      CHECK(best < 1e-8);
    }
  }
}

TEST_CASE("root_music_v is scale invariant") {
  std::mt19937_64 rng(31);
  const CMatrix a = oracle::random_complex(6, 3, rng);
  const CMatrix b = a * a.adjoint() + 0.01 * CMatrix::Identity(6, 6);
  const RootMusicResult r1 = root_music_v(b, 3);
  const RootMusicResult r2 = root_music_v(42.0 * b, 3);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(r1.v[j] - r2.v[j]) < 1e-10);
}

TEST_CASE("allocation") {
  PeakSelection peaks{{4, 9}, false};
  const PeakAllocation a = allocate_peaks(peaks, {2, 3});
  CHECK(a.total() == 5);
  CHECK(a.entries == std::vector<std::pair<Index, int>>{{4, 2}, {9, 3}});
  CHECK_NOTHROW(a.validate(6));
  CHECK_THROWS_AS(a.validate(3), ArgumentError);
  CHECK_THROWS_AS(allocate_peaks(peaks, {5}), ArgumentError);
  CHECK_THROWS_AS((PeakAllocation{{{1, 1}, {1, 1}}}.validate(4)), ArgumentError);
  CHECK_THROWS_AS((PeakAllocation{{{1, 0}}}.validate(4)), ArgumentError);

  HMsblState s;
  s.b_mats = {covariance_of({0.1, -0.6}, 5) + 1e-6 * CMatrix::Identity(5, 5), covariance_of({0.4}, 5)};
  s.gamma = RVector::Ones(2);
  s.active = {true, true};
  const PeakAllocation guess = auto_allocate(s, PeakSelection{{0, 1}, false});
  CHECK(guess.entries == std::vector<std::pair<Index, int>>{{0, 2}, {1, 1}});
}

TEST_CASE("pair_estimates") {
  const Grid1D gu = uniform_grid(5);
  HMsblState s;
  s.gamma = RVector::Ones(5);
  s.active.assign(5, true);
  for (int i = 0; i < 5; ++i) s.b_mats.push_back(CMatrix::Identity(4, 4) / 2.0);
  s.b_mats[1] = covariance_of({0.35}, 4);
  s.b_mats[3] = covariance_of({-0.2}, 4);

  SUBCASE("one block") {
    const PairedEstimates p = pair_estimates(s, gu, PeakAllocation{{{1, 1}}});
    REQUIRE(p.pairs.size() == 1);
    CHECK(p.pairs[0].u == gu[1]);
    CHECK(std::abs(p.pairs[0].v - 0.35) < 1e-6);
    CHECK(p.pairs[0].block == 1);
  }
  SUBCASE("two blocks") {
    const PairedEstimates p = pair_estimates(s, gu, PeakAllocation{{{3, 1}, {1, 1}}});
    REQUIRE(p.pairs.size() == 2);
    CHECK(p.pairs[0].u != p.pairs[1].u);
    CHECK(std::abs(p.pairs[0].v + 0.2) < 1e-6);
    const auto src = p.sources();
    CHECK(src[1] == Source{gu[1], p.pairs[1].v});
  }
  SUBCASE("pruned block") {
    s.active[3] = false;
    CHECK_THROWS_AS(pair_estimates(s, gu, PeakAllocation{{{3, 1}}}), ArgumentError);
  }
}
