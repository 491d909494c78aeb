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


#include "hmsbl/msbl.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace hmsbl {

namespace {

MsblState to_msbl_state(const HMsblState& s, const std::vector<Source>& labels) {
  return {s.gamma, s.lambda, s.active, s.cost_trace, labels};
}

}  // namespace

MsblResult msbl_run(const SnapshotSet& y, const KronDictionary& dict, const HMsblParams& params,
                    const MsblObserver& observer) {
  if (dict.columns() == 0) throw ArgumentError("MSBL dictionary has no columns");
  if (static_cast<Index>(dict.labels.size()) != dict.columns()) {
    throw ArgumentError("MSBL dictionary labels out of sync with columns");
  }
  IterationObserver forward;
  if (observer) {
    forward = [&](int it, const HMsblState& s) { observer(it, to_msbl_state(s, dict.labels)); };
  }
  SolverResult r = run(y, BlockDictionary::msbl(dict), params, forward);
  return {to_msbl_state(r.state, dict.labels), std::move(r.posterior.mu), std::move(r.diagnostics)};
}

std::vector<Source> msbl_estimates(const MsblState& state, int k) {
  if (k < 1) throw ArgumentError("msbl_estimates needs k >= 1");
  std::vector<Index> idx;
  for (Index i = 0; i < state.gamma.size(); ++i) {
    if (state.active[static_cast<std::size_t>(i)]) idx.push_back(i);
  }
  if (static_cast<Index>(idx.size()) < k) {
    throw ArgumentError("only " + std::to_string(idx.size()) + " active grid points for " +
                        std::to_string(k) + " sources");
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return state.gamma(a) > state.gamma(b); });
  std::vector<Source> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) out.push_back(state.labels[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])]);
  return out;
}

}  // namespace hmsbl
