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
#include <optional>
#include <stdexcept>
#include <vector>

#include "hmsbl/signal_model.hpp"
#include "hmsbl/types.hpp"

namespace hmsbl {

/// Optimal one-to-one matching of estimates to true sources.
struct MatchReport {
  std::vector<Index> assignment;         // assignment[t] = estimate matched to truth t (-1 if none)
  std::vector<double> per_source_sq_err;  // (u_t - u^)^2 + (v_t - v^)^2, per truth
  double rmse = 0.0;
  bool unmatched = false;                // set on partial (greedy) reports
};

/// Thrown on count mismatch; carries a greedy partial report.
class MatchError : public std::runtime_error {
 public:
  MatchError(const std::string& what, MatchReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const MatchReport& partial() const noexcept { return partial_; }

 private:
  MatchReport partial_;
};

/// Minimum-total-squared-error bijection; exhaustive for K <= 8, Hungarian
/// algorithm above.
MatchReport match_and_rmse(const std::vector<Source>& estimates, const std::vector<Source>& truth);

/// Greedy nearest-pair matching; used for partial reports and as a baseline.
MatchReport greedy_match(const std::vector<Source>& estimates, const std::vector<Source>& truth);

/// Square cost matrix assignment (rows to columns), O(n^3).
std::vector<Index> hungarian_assignment(const RMatrix& cost);

struct TrialSummary {
  std::size_t count = 0;
  double mean_rmse = 0.0;
  double std_rmse = 0.0;  // population standard deviation
  double success_rate = 0.0;
};

TrialSummary aggregate_trials(const std::vector<MatchReport>& reports, double success_threshold);

struct TimingResult {
  double median_seconds = 0.0;
  std::optional<double> per_iteration_seconds;
  std::vector<double> samples;
};

/// Runs `closure` once as warm-up, then `repetitions` timed times on a
/// monotonic clock. The closure returns the iteration count it performed;
/// per-iteration time is the median over repetitions divided by that count.
TimingResult timeit(const std::function<int()>& closure, int repetitions);

/// timeit over several closures with the repetitions interleaved round-robin,
/// so slow drift in machine speed affects every closure alike.
std::vector<TimingResult> timeit_interleaved(const std::vector<std::function<int()>>& closures,
                                             int repetitions);

double median(std::vector<double> values);

}  // namespace hmsbl
