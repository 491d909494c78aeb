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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmsbl/signal_model.hpp"
#include "hmsbl/solver.hpp"

namespace hmsbl {

enum class ExperimentKind { exp1, exp2, exp3, custom };

std::string to_string(ExperimentKind kind);

/// Where the true sources of each trial come from.
struct SourceSpec {
  enum class Kind {
    explicit_list,   // fixed list, same in every trial
    random_on_grid,  // fresh draw per trial: distinct u and v grid indices
    grid_product,    // every (u_indices[a], v_indices[b]) pair
  };
  Kind kind = Kind::explicit_list;
  std::vector<Source> sources;
  int count = 0;
  int min_separation = 1;  // grid steps, applied to both axes
  std::vector<int> u_indices;
  std::vector<int> v_indices;
};

enum class LambdaSetting { oracle, adaptive, value };

struct AlgorithmConfig {
  bool enabled = true;
  HMsblParams params;
  LambdaSetting lambda = LambdaSetting::oracle;
  double lambda_value = 0.0;
  /// H-MSBL only: sources per selected u-peak, in peak order. Empty means one
  /// source per peak.
  std::vector<int> allocation;
};

struct TimingConfig {
  int iterations = 10;
  int repetitions = 5;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::custom;
  std::uint64_t seed = 0;
  int trials = 1;
  std::string output;

  UraConfig array;
  double snr_db = 20.0;
  int snapshots = 50;
  SourceSpec sources;

  int mu = 100;
  int mv = 100;
  std::vector<int> mv_sweep;

  AlgorithmConfig hmsbl;
  AlgorithmConfig msbl;

  std::vector<int> budgets;
  TimingConfig timing;
  double success_threshold = 0.05;

  /// Source count K, known up front for every source kind.
  int source_count() const;
};

/// Either a valid config or the complete list of problems found, each
/// prefixed with its field path.
struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return config.has_value(); }
};

ConfigResult validate_config(const std::string& text);
ConfigResult validate_config(const nlohmann::json& doc);

/// Normalized form with every default made explicit; validates back to an
/// equal config.
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace hmsbl
