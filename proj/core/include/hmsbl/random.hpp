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
#include <random>

namespace hmsbl {

/// Named substreams derived from one experiment seed. Each (seed, stream,
/// index) triple yields an independent generator, so trials can run in any
/// order or in parallel without changing their numbers.
enum class Stream : std::uint64_t {
  symbols = 1,
  noise = 2,
  scene = 3,
  trial = 4,
};

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

}  // namespace hmsbl
