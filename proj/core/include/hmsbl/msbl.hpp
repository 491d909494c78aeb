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

#include <vector>

#include "hmsbl/dictionary.hpp"
#include "hmsbl/solver.hpp"

namespace hmsbl {

/// EM-MSBL over a 2-D Kronecker dictionary: one scalar variance per labelled
/// (u, v) grid point.
struct MsblState {
  RVector gamma;
  double lambda = 0.0;
  std::vector<bool> active;
  std::vector<double> cost_trace;
  std::vector<Source> labels;
};

struct MsblResult {
  MsblState state;
  CMatrix mean;  // P x columns of Y
  Diagnostics diagnostics;
};

using MsblObserver = std::function<void(int iteration, const MsblState& state)>;

/// Runs the block solver with block size 1, where the B-update is the
/// identity and normalization is a no-op.
MsblResult msbl_run(const SnapshotSet& y, const KronDictionary& dict, const HMsblParams& params,
                    const MsblObserver& observer = {});

/// Labels of the k largest gamma among active points; ties go to the lower
/// flat index.
std::vector<Source> msbl_estimates(const MsblState& state, int k);

}  // namespace hmsbl
