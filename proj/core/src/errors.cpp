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


#include "hmsbl/types.hpp"

namespace hmsbl {

SolverError::SolverError(const std::string& what, int iteration)
    : std::runtime_error(iteration >= 0
                             ? what + " (iteration " + std::to_string(iteration) + ")"
                             : what),
      iteration_(iteration) {}

}  // namespace hmsbl
