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
#include <fstream>
#include <sstream>

#include "hmsbl/config.hpp"

using namespace hmsbl;
using nlohmann::json;

namespace {

json base_doc() {
  return json::parse(R"({
    "experiment": "custom",
    "seed": 7,
    "trials": 2,
    "array": {"nx": 3, "ny": 4},
    "scene": {"snr_db": 20, "snapshots": 30, "sources": [{"u": 0.1, "v": 0.2}, {"u": -0.4, "v": 0.3}]},
    "grids": {"mu": 40, "mv": 40}
  })");
}

bool has_error(const ConfigResult& r, const std::string& needle) {
  return std::any_of(r.errors.begin(), r.errors.end(),
                     [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("shipped experiment configs validate") {
  for (const char* name : {"exp1.json", "exp2.json", "exp3.json"}) {
    const ConfigResult r = validate_config(read_file(std::string(HMSBL_CONFIG_DIR) + "/" + name));
    INFO(name);
    CHECK(r.ok());
    CHECK(r.errors.empty());
  }
  const ConfigResult exp2 = validate_config(read_file(std::string(HMSBL_CONFIG_DIR) + "/exp2.json"));
  REQUIRE(exp2.ok());
  const ExperimentConfig& c = *exp2.config;
  CHECK(c.array.nx == 3);
  CHECK(c.array.ny == 6);
  CHECK(c.source_count() == 10);
  CHECK(c.snr_db == 20.0);
  CHECK(c.snapshots == 50);
  CHECK(c.mu == 100);
  CHECK(c.mv == 100);
  CHECK(c.hmsbl.allocation == std::vector<int>{5, 5});
}

TEST_CASE("minimal config and defaults") {
  const ConfigResult r = validate_config(base_doc());
  REQUIRE(r.ok());
  const ExperimentConfig& c = *r.config;
  CHECK(c.seed == 7);
  CHECK(c.output == "results/custom");
  CHECK(c.hmsbl.enabled);
  CHECK(c.hmsbl.params.max_iters == 500);
  CHECK(c.hmsbl.params.prune_tol == 1e-3);
  CHECK(c.hmsbl.params.prune_mode == PruneMode::relative);
  CHECK(c.hmsbl.lambda == LambdaSetting::oracle);
  CHECK(c.source_count() == 2);
}

TEST_CASE("validation errors carry field paths") {
  SUBCASE("infeasible source names its index") {
    json d = base_doc();
    d["scene"]["sources"][1] = {{"u", 1.0}, {"v", std::sqrt(0.5)}};
    const ConfigResult r = validate_config(d);
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, "scene.sources[1]"));
    CHECK(has_error(r, "u^2 + v^2 <= 1"));
    CHECK(has_error(r, "1.5"));
  }
  SUBCASE("missing seed") {
    json d = base_doc();
    d.erase("seed");
    const ConfigResult r = validate_config(d);
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, "seed"));
    CHECK(has_error(r, "missing"));
  }
  SUBCASE("zero trials") {
    json d = base_doc();
    d["trials"] = 0;
    CHECK(has_error(validate_config(d), "trials"));
  }
  SUBCASE("every problem is reported") {
    json d = base_doc();
    d.erase("seed");
    d["trials"] = 0;
    d["array"]["nx"] = 0;
    d["grids"]["mu"] = "many";
    d["algorithms"] = {{"hmsbl", {{"prune", "sometimes"}, {"lambda", -1}}}, {"lasso", json::object()}};
    const ConfigResult r = validate_config(d);
    CHECK(r.errors.size() >= 7);
    CHECK(has_error(r, "seed"));
    CHECK(has_error(r, "trials"));
    CHECK(has_error(r, "array.nx"));
    CHECK(has_error(r, "grids.mu"));
    CHECK(has_error(r, "algorithms.hmsbl.prune"));
    CHECK(has_error(r, "algorithms.hmsbl.lambda"));
    CHECK(has_error(r, "algorithms.lasso"));
  }
  SUBCASE("allocation must cover K within [1, ny - 1]") {
    json d = base_doc();
    d["algorithms"] = {{"hmsbl", {{"allocation", {1, 4}}}}};
    const ConfigResult r = validate_config(d);
    CHECK(has_error(r, "algorithms.hmsbl.allocation[1]"));
    CHECK(has_error(r, "expected K = 2"));
  }
  SUBCASE("experiment-specific requirements") {
    json d = base_doc();
    d["experiment"] = "exp1";
    CHECK(has_error(validate_config(d), "grids.mv_sweep"));
    d["experiment"] = "exp3";
    CHECK(has_error(validate_config(d), "convergence.budgets"));
    d["convergence"] = {{"budgets", {10, 900}}};
    CHECK(has_error(validate_config(d), "convergence.budgets[1]"));
    d["experiment"] = "exp9";
    CHECK(has_error(validate_config(d), "experiment"));
  }
  SUBCASE("source generators") {
    json d = base_doc();
    d["scene"]["sources"] = {{"random_on_grid", {{"count", 20}, {"min_separation", 3}}}};
    CHECK(has_error(validate_config(d), "random_on_grid"));
    d["scene"]["sources"] = {{"grid_product", {{"u_indices", {1, 40}}, {"v_indices", {3}}}}};
    CHECK(has_error(validate_config(d), "u_indices[1]"));
    d["scene"]["sources"] = {{"grid_product", {{"u_indices", {1, 39}}, {"v_indices", {3}}}}};
    const ConfigResult ok = validate_config(d);
    REQUIRE(ok.ok());
    CHECK(ok.config->source_count() == 2);
  }
  SUBCASE("malformed text never throws") {
    ConfigResult r;
    CHECK_NOTHROW(r = validate_config(std::string("{\"seed\": ")));
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.errors.empty());
    CHECK_NOTHROW(r = validate_config(std::string("[1, 2]")));
    CHECK_FALSE(r.ok());
  }
}

TEST_CASE("normalized echo re-validates to the same config") {
  for (const char* name : {"exp1.json", "exp2.json", "exp3.json"}) {
    const ConfigResult r = validate_config(read_file(std::string(HMSBL_CONFIG_DIR) + "/" + name));
    REQUIRE(r.ok());
    const json echo = config_to_json(*r.config);
    const ConfigResult again = validate_config(echo);
    REQUIRE(again.ok());
    CHECK(config_to_json(*again.config) == echo);
  }
  json d = base_doc();
  d["algorithms"] = {{"msbl", {{"lambda", 0.25}, {"enabled", false}, {"prune", "absolute"}}}};
  const ConfigResult r = validate_config(d);
  REQUIRE(r.ok());
  CHECK(r.config->msbl.lambda == LambdaSetting::value);
  CHECK(r.config->msbl.lambda_value == 0.25);
  const json echo = config_to_json(*r.config);
  CHECK(echo["algorithms"]["msbl"]["lambda"] == 0.25);
  CHECK(config_to_json(*validate_config(echo).config) == echo);
}
