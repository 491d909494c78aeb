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


#include "hmsbl/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hmsbl {

namespace {

double sq_err(const Source& a, const Source& b) {
  const double du = a.u - b.u;
  const double dv = a.v - b.v;
  return du * du + dv * dv;
}

MatchReport report_from(const std::vector<Index>& assignment, const std::vector<Source>& est,
                        const std::vector<Source>& truth) {
  MatchReport r;
  r.assignment = assignment;
  double total = 0.0;
  std::size_t matched = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const Index e = assignment[t];
    if (e < 0) {
      r.per_source_sq_err.push_back(std::numeric_limits<double>::quiet_NaN());
      r.unmatched = true;
      continue;
    }
    const double s = sq_err(truth[t], est[static_cast<std::size_t>(e)]);
    r.per_source_sq_err.push_back(s);
    total += s;
    ++matched;
  }
  r.rmse = matched > 0 ? std::sqrt(total / static_cast<double>(matched)) : 0.0;
  return r;
}

}  // namespace

std::vector<Index> hungarian_assignment(const RMatrix& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n) throw ArgumentError("hungarian_assignment needs a square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; column 0 is a sentinel.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[ju];
        if (cur < minv[ju]) {
          minv[ju] = cur;
          way[ju] = j0;
        }
        if (minv[ju] < delta) {
          delta = minv[ju];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) {
          u[static_cast<std::size_t>(p[ju])] += delta;
          v[ju] -= delta;
        } else {
          minv[ju] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> row_to_col(static_cast<std::size_t>(n), -1);
  for (Index j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return row_to_col;
}

MatchReport greedy_match(const std::vector<Source>& estimates, const std::vector<Source>& truth) {
  std::vector<Index> assignment(truth.size(), -1);
  std::vector<bool> est_used(estimates.size(), false);
  const std::size_t rounds = std::min(estimates.size(), truth.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bt = 0, be = 0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (assignment[t] >= 0) continue;
      for (std::size_t e = 0; e < estimates.size(); ++e) {
        if (est_used[e]) continue;
        const double s = sq_err(truth[t], estimates[e]);
        if (s < best) {
          best = s;
          bt = t;
          be = e;
        }
      }
    }
    assignment[bt] = static_cast<Index>(be);
    est_used[be] = true;
  }
  return report_from(assignment, estimates, truth);
}

MatchReport match_and_rmse(const std::vector<Source>& estimates, const std::vector<Source>& truth) {
  if (estimates.empty()) throw ArgumentError("match_and_rmse needs at least one estimate");
  if (estimates.size() != truth.size()) {
    throw MatchError("estimate count " + std::to_string(estimates.size()) + " != source count " +
                         std::to_string(truth.size()),
                     greedy_match(estimates, truth));
  }
  const std::size_t k = truth.size();
  std::vector<Index> best_perm;

  if (k <= 8) {
    std::vector<Index> perm(k);
    std::iota(perm.begin(), perm.end(), Index{0});
    double best = std::numeric_limits<double>::infinity();
    do {
      double total = 0.0;
      for (std::size_t t = 0; t < k && total < best; ++t) {
        total += sq_err(truth[t], estimates[static_cast<std::size_t>(perm[t])]);
      }
      if (total < best) {
        best = total;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    RMatrix cost(static_cast<Index>(k), static_cast<Index>(k));
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t e = 0; e < k; ++e) {
        cost(static_cast<Index>(t), static_cast<Index>(e)) = sq_err(truth[t], estimates[e]);
      }
    }
    best_perm = hungarian_assignment(cost);
  }
  return report_from(best_perm, estimates, truth);
}

TrialSummary aggregate_trials(const std::vector<MatchReport>& reports, double success_threshold) {
  if (reports.empty()) throw ArgumentError("aggregate_trials needs at least one report");
  TrialSummary s;
  s.count = reports.size();
  const double n = static_cast<double>(reports.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (const auto& r : reports) {
    sum += r.rmse;
    if (r.rmse < success_threshold) ++hits;
  }
  s.mean_rmse = sum / n;
  double ss = 0.0;
  for (const auto& r : reports) ss += (r.rmse - s.mean_rmse) * (r.rmse - s.mean_rmse);
  s.std_rmse = std::sqrt(ss / n);
  s.success_rate = static_cast<double>(hits) / n;
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

TimingResult timeit(const std::function<int()>& closure, int repetitions) {
  return timeit_interleaved({closure}, repetitions).front();
}

std::vector<TimingResult> timeit_interleaved(const std::vector<std::function<int()>>& closures,
                                             int repetitions) {
  if (repetitions < 1) throw ArgumentError("timeit needs at least one repetition");
  using clock = std::chrono::steady_clock;
  for (const auto& c : closures) c();  // warm-up

  std::vector<TimingResult> out(closures.size());
  std::vector<int> iterations(closures.size(), 0);
  for (int r = 0; r < repetitions; ++r) {
    for (std::size_t i = 0; i < closures.size(); ++i) {
      const auto start = clock::now();
      iterations[i] = closures[i]();
      out[i].samples.push_back(std::chrono::duration<double>(clock::now() - start).count());
    }
  }
  for (std::size_t i = 0; i < closures.size(); ++i) {
    out[i].median_seconds = median(out[i].samples);
    if (iterations[i] > 0) out[i].per_iteration_seconds = out[i].median_seconds / iterations[i];
  }
  return out;
}

}  // namespace hmsbl
