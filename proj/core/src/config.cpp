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


#include "hmsbl/config.hpp"

#include <cmath>
#include <sstream>

namespace hmsbl {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::exp1: return "exp1";
    case ExperimentKind::exp2: return "exp2";
    case ExperimentKind::exp3: return "exp3";
    case ExperimentKind::custom: return "custom";
  }
  return "custom";
}

int ExperimentConfig::source_count() const {
  switch (sources.kind) {
    case SourceSpec::Kind::explicit_list: return static_cast<int>(sources.sources.size());
    case SourceSpec::Kind::random_on_grid: return sources.count;
    case SourceSpec::Kind::grid_product:
      return static_cast<int>(sources.u_indices.size() * sources.v_indices.size());
  }
  return 0;
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Collects every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  const json* field(const json& obj, const std::string& key, const std::string& path, bool required) {
    const std::string p = join(path, key);
    if (!obj.is_object()) return nullptr;
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      if (required) fail(p, "required field missing");
      return nullptr;
    }
    return &*it;
  }

  template <typename T>
  void number(const json& obj, const std::string& key, const std::string& path, bool required, T& out) {
    const json* j = field(obj, key, path, required);
    if (!j) return;
    if constexpr (std::is_integral_v<T>) {
      if (!j->is_number_integer()) return fail(join(path, key), "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (j->is_number_unsigned()) {
          out = j->get<T>();
        } else if (j->get<std::int64_t>() < 0) {
          fail(join(path, key), "expected a non-negative integer");
        } else {
          out = static_cast<T>(j->get<std::int64_t>());
        }
      } else {
        out = j->get<T>();
      }
    } else {
      if (!j->is_number()) return fail(join(path, key), "expected a number");
      out = j->get<T>();
    }
  }

  void int_list(const json& obj, const std::string& key, const std::string& path, bool required,
                std::vector<int>& out) {
    const json* j = field(obj, key, path, required);
    if (!j) return;
    const std::string p = join(path, key);
    if (!j->is_array()) return fail(p, "expected an array of integers");
    out.clear();
    for (std::size_t i = 0; i < j->size(); ++i) {
      if (!(*j)[i].is_number_integer()) {
        fail(indexed(p, i), "expected an integer");
        continue;
      }
      out.push_back((*j)[i].get<int>());
    }
  }
};

void read_sources(Reader& r, const json& scene, ExperimentConfig& cfg) {
  const json* src = r.field(scene, "sources", "scene", true);
  if (!src) return;
  const std::string path = "scene.sources";
  SourceSpec& spec = cfg.sources;

  if (src->is_array()) {
    spec.kind = SourceSpec::Kind::explicit_list;
    for (std::size_t i = 0; i < src->size(); ++i) {
      const json& s = (*src)[i];
      const std::string p = indexed(path, i);
      if (!s.is_object()) {
        r.fail(p, "expected an object with u and v");
        continue;
      }
      Source out{};
      bool ok = true;
      for (const char* key : {"u", "v"}) {
        const json* j = r.field(s, key, p, true);
        if (!j) {
          ok = false;
        } else if (!j->is_number()) {
          r.fail(join(p, key), "expected a number");
          ok = false;
        } else {
          (key[0] == 'u' ? out.u : out.v) = j->get<double>();
        }
      }
      if (ok) spec.sources.push_back(out);
    }
    return;
  }
  if (!src->is_object()) return r.fail(path, "expected a list of sources or a generator object");

  if (src->contains("random_on_grid")) {
    spec.kind = SourceSpec::Kind::random_on_grid;
    const json& g = (*src)["random_on_grid"];
    const std::string p = join(path, "random_on_grid");
    r.number(g, "count", p, true, spec.count);
    r.number(g, "min_separation", p, false, spec.min_separation);
  } else if (src->contains("grid_product")) {
    spec.kind = SourceSpec::Kind::grid_product;
    const json& g = (*src)["grid_product"];
    const std::string p = join(path, "grid_product");
    r.int_list(g, "u_indices", p, true, spec.u_indices);
    r.int_list(g, "v_indices", p, true, spec.v_indices);
  } else {
    r.fail(path, "unknown generator; expected random_on_grid or grid_product");
  }
}

void read_algorithm(Reader& r, const json& algs, const std::string& name, AlgorithmConfig& out) {
  const std::string path = join("algorithms", name);
  if (!algs.is_object() || !algs.contains(name)) return;
  const json& a = algs[name];
  if (!a.is_object()) return r.fail(path, "expected an object");

  if (const json* j = r.field(a, "enabled", path, false)) {
    if (j->is_boolean()) out.enabled = j->get<bool>();
    else r.fail(join(path, "enabled"), "expected a boolean");
  }
  r.number(a, "max_iters", path, false, out.params.max_iters);
  r.number(a, "prune_tol", path, false, out.params.prune_tol);
  r.number(a, "b_loading", path, false, out.params.b_loading);
  r.number(a, "cost_tol", path, false, out.params.cost_tol);
  if (const json* j = r.field(a, "compress", path, false)) {
    if (j->is_boolean()) out.params.compress = j->get<bool>();
    else r.fail(join(path, "compress"), "expected a boolean");
  }
  if (const json* j = r.field(a, "prune", path, false)) {
    const std::string mode = j->is_string() ? j->get<std::string>() : "";
    if (mode == "off") out.params.prune_mode = PruneMode::off;
    else if (mode == "relative") out.params.prune_mode = PruneMode::relative;
    else if (mode == "absolute") out.params.prune_mode = PruneMode::absolute;
    else r.fail(join(path, "prune"), "expected \"off\", \"relative\" or \"absolute\"");
  }
  if (const json* j = r.field(a, "lambda", path, false)) {
    if (j->is_number()) {
      out.lambda = LambdaSetting::value;
      out.lambda_value = j->get<double>();
      if (!(out.lambda_value > 0.0)) r.fail(join(path, "lambda"), "must be positive");
    } else if (j->is_string() && j->get<std::string>() == "oracle") {
      out.lambda = LambdaSetting::oracle;
    } else if (j->is_string() && j->get<std::string>() == "adaptive") {
      out.lambda = LambdaSetting::adaptive;
    } else {
      r.fail(join(path, "lambda"), "expected \"oracle\", \"adaptive\" or a positive number");
    }
  }
  if (name == "hmsbl") r.int_list(a, "allocation", path, false, out.allocation);

  if (out.params.max_iters < 0) r.fail(join(path, "max_iters"), "must be >= 0");
  if (!(out.params.prune_tol > 0.0)) r.fail(join(path, "prune_tol"), "must be > 0");
  if (!(out.params.b_loading >= 0.0)) r.fail(join(path, "b_loading"), "must be >= 0");
  if (!(out.params.cost_tol >= 0.0)) r.fail(join(path, "cost_tol"), "must be >= 0");
}

void check_invariants(Reader& r, ExperimentConfig& cfg) {
  if (cfg.trials < 1) r.fail("trials", "must be >= 1");
  if (cfg.array.nx < 1) r.fail("array.nx", "must be >= 1");
  if (cfg.array.ny < 1) r.fail("array.ny", "must be >= 1");
  if (cfg.snapshots < 1) r.fail("scene.snapshots", "must be >= 1");
  if (std::isnan(cfg.snr_db)) r.fail("scene.snr_db", "must be a number");
  if (cfg.mu < 2) r.fail("grids.mu", "must be >= 2");
  if (cfg.mv < 2) r.fail("grids.mv", "must be >= 2");
  for (std::size_t i = 0; i < cfg.mv_sweep.size(); ++i) {
    if (cfg.mv_sweep[i] < 2) r.fail(indexed("grids.mv_sweep", i), "must be >= 2");
  }
  if (cfg.timing.iterations < 1) r.fail("timing.iterations", "must be >= 1");
  if (cfg.timing.repetitions < 1) r.fail("timing.repetitions", "must be >= 1");
  if (!(cfg.success_threshold > 0.0)) r.fail("success_threshold", "must be > 0");

  const SourceSpec& s = cfg.sources;
  switch (s.kind) {
    case SourceSpec::Kind::explicit_list:
      if (s.sources.empty()) r.fail("scene.sources", "need at least one source");
      for (std::size_t i = 0; i < s.sources.size(); ++i) {
        const Source& src = s.sources[i];
        const double r2 = src.u * src.u + src.v * src.v;
        if (!(r2 <= 1.0)) {
          std::ostringstream msg;
          msg << "violates u^2 + v^2 <= 1 (got " << r2 << ")";
          r.fail(indexed("scene.sources", i), msg.str());
        }
      }
      break;
    case SourceSpec::Kind::random_on_grid:
      if (s.count < 1) r.fail("scene.sources.random_on_grid.count", "must be >= 1");
      if (s.min_separation < 1) r.fail("scene.sources.random_on_grid.min_separation", "must be >= 1");
      if (s.count * s.min_separation > std::min(cfg.mu, cfg.mv)) {
        r.fail("scene.sources.random_on_grid", "count * min_separation exceeds the grid size");
      }
      break;
    case SourceSpec::Kind::grid_product: {
      const std::string p = "scene.sources.grid_product";
      if (s.u_indices.empty()) r.fail(p + ".u_indices", "need at least one index");
      if (s.v_indices.empty()) r.fail(p + ".v_indices", "need at least one index");
      for (std::size_t i = 0; i < s.u_indices.size(); ++i) {
        if (s.u_indices[i] < 0 || s.u_indices[i] >= cfg.mu) r.fail(indexed(p + ".u_indices", i), "outside the u-grid");
      }
      for (std::size_t i = 0; i < s.v_indices.size(); ++i) {
        if (s.v_indices[i] < 0 || s.v_indices[i] >= cfg.mv) r.fail(indexed(p + ".v_indices", i), "outside the v-grid");
      }
      break;
    }
  }

  const int k = cfg.source_count();
  for (const auto* alg : {&cfg.hmsbl, &cfg.msbl}) {
    const std::string name = alg == &cfg.hmsbl ? "hmsbl" : "msbl";
    if (alg->lambda == LambdaSetting::oracle && !std::isfinite(noise_variance(cfg.snr_db))) {
      r.fail("algorithms." + name + ".lambda", "oracle noise variance needs a finite SNR");
    }
    if (alg->lambda == LambdaSetting::oracle && !(noise_variance(cfg.snr_db) > 0.0)) {
      r.fail("algorithms." + name + ".lambda", "oracle noise variance is zero; give an explicit value");
    }
    for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
      if (alg->enabled && cfg.budgets[i] > alg->params.max_iters) {
        r.fail(indexed("convergence.budgets", i), "exceeds algorithms." + name + ".max_iters");
      }
    }
  }
  if (!cfg.hmsbl.allocation.empty()) {
    int total = 0;
    for (std::size_t i = 0; i < cfg.hmsbl.allocation.size(); ++i) {
      const int c = cfg.hmsbl.allocation[i];
      total += c;
      if (c < 1 || c > cfg.array.ny - 1) {
        r.fail(indexed("algorithms.hmsbl.allocation", i), "must lie in [1, ny - 1]");
      }
    }
    if (total != k) r.fail("algorithms.hmsbl.allocation", "sums to " + std::to_string(total) + ", expected K = " + std::to_string(k));
  } else if (cfg.hmsbl.enabled && cfg.array.ny < 2) {
    r.fail("array.ny", "H-MSBL root-MUSIC needs ny >= 2");
  }
  for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
    if (cfg.budgets[i] < 1) r.fail(indexed("convergence.budgets", i), "must be >= 1");
  }
  if (cfg.experiment == ExperimentKind::exp1 && cfg.mv_sweep.empty()) {
    r.fail("grids.mv_sweep", "exp1 needs a v-grid sweep");
  }
  if (cfg.experiment == ExperimentKind::exp3 && cfg.budgets.empty()) {
    r.fail("convergence.budgets", "exp3 needs iteration budgets");
  }
}

}  // namespace

ConfigResult validate_config(const json& doc) {
  Reader r;
  ConfigResult result;
  if (!doc.is_object()) {
    result.errors.push_back("<root>: expected a JSON object");
    return result;
  }
  ExperimentConfig cfg;

  if (const json* j = r.field(doc, "experiment", "", true)) {
    const std::string e = j->is_string() ? j->get<std::string>() : "";
    if (e == "exp1") cfg.experiment = ExperimentKind::exp1;
    else if (e == "exp2") cfg.experiment = ExperimentKind::exp2;
    else if (e == "exp3") cfg.experiment = ExperimentKind::exp3;
    else if (e == "custom") cfg.experiment = ExperimentKind::custom;
    else r.fail("experiment", "expected exp1, exp2, exp3 or custom");
  }
  r.number(doc, "seed", "", true, cfg.seed);
  r.number(doc, "trials", "", true, cfg.trials);
  if (const json* j = r.field(doc, "output", "", false)) {
    if (j->is_string()) cfg.output = j->get<std::string>();
    else r.fail("output", "expected a path string");
  }
  if (cfg.output.empty()) cfg.output = "results/" + to_string(cfg.experiment);
  r.number(doc, "success_threshold", "", false, cfg.success_threshold);

  if (const json* a = r.field(doc, "array", "", true)) {
    r.number(*a, "nx", "array", true, cfg.array.nx);
    r.number(*a, "ny", "array", true, cfg.array.ny);
  }
  if (const json* s = r.field(doc, "scene", "", true)) {
    r.number(*s, "snr_db", "scene", true, cfg.snr_db);
    r.number(*s, "snapshots", "scene", true, cfg.snapshots);
    read_sources(r, *s, cfg);
  }
  if (const json* g = r.field(doc, "grids", "", true)) {
    r.number(*g, "mu", "grids", true, cfg.mu);
    r.number(*g, "mv", "grids", true, cfg.mv);
    r.int_list(*g, "mv_sweep", "grids", false, cfg.mv_sweep);
  }
  if (const json* algs = r.field(doc, "algorithms", "", false)) {
    if (!algs->is_object()) {
      r.fail("algorithms", "expected an object");
    } else {
      for (const auto& [key, _] : algs->items()) {
        if (key != "hmsbl" && key != "msbl") r.fail(join("algorithms", key), "unknown algorithm");
      }
      read_algorithm(r, *algs, "hmsbl", cfg.hmsbl);
      read_algorithm(r, *algs, "msbl", cfg.msbl);
    }
  }
  if (const json* c = r.field(doc, "convergence", "", false)) {
    r.int_list(*c, "budgets", "convergence", false, cfg.budgets);
  }
  if (const json* t = r.field(doc, "timing", "", false)) {
    r.number(*t, "iterations", "timing", false, cfg.timing.iterations);
    r.number(*t, "repetitions", "timing", false, cfg.timing.repetitions);
  }

  check_invariants(r, cfg);

  result.errors = std::move(r.errors);
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

ConfigResult validate_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    ConfigResult r;
    r.errors.push_back(std::string("<root>: parse error: ") + e.what());
    return r;
  }
  return validate_config(doc);
}

namespace {

json algorithm_to_json(const AlgorithmConfig& a, bool with_allocation) {
  json j;
  j["enabled"] = a.enabled;
  j["max_iters"] = a.params.max_iters;
  j["prune"] = a.params.prune_mode == PruneMode::off        ? "off"
               : a.params.prune_mode == PruneMode::relative ? "relative"
                                                            : "absolute";
  j["prune_tol"] = a.params.prune_tol;
  j["b_loading"] = a.params.b_loading;
  j["cost_tol"] = a.params.cost_tol;
  j["compress"] = a.params.compress;
  switch (a.lambda) {
    case LambdaSetting::oracle: j["lambda"] = "oracle"; break;
    case LambdaSetting::adaptive: j["lambda"] = "adaptive"; break;
    case LambdaSetting::value: j["lambda"] = a.lambda_value; break;
  }
  if (with_allocation) j["allocation"] = a.allocation;
  return j;
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["output"] = c.output;
  j["success_threshold"] = c.success_threshold;
  j["array"] = {{"nx", c.array.nx}, {"ny", c.array.ny}};

  json scene = {{"snr_db", c.snr_db}, {"snapshots", c.snapshots}};
  switch (c.sources.kind) {
    case SourceSpec::Kind::explicit_list: {
      json list = json::array();
      for (const auto& s : c.sources.sources) list.push_back({{"u", s.u}, {"v", s.v}});
      scene["sources"] = list;
      break;
    }
    case SourceSpec::Kind::random_on_grid:
      scene["sources"] = {{"random_on_grid",
                           {{"count", c.sources.count}, {"min_separation", c.sources.min_separation}}}};
      break;
    case SourceSpec::Kind::grid_product:
      scene["sources"] = {{"grid_product",
                           {{"u_indices", c.sources.u_indices}, {"v_indices", c.sources.v_indices}}}};
      break;
  }
  j["scene"] = scene;
  j["grids"] = {{"mu", c.mu}, {"mv", c.mv}, {"mv_sweep", c.mv_sweep}};
  j["algorithms"] = {{"hmsbl", algorithm_to_json(c.hmsbl, true)},
                     {"msbl", algorithm_to_json(c.msbl, false)}};
  j["convergence"] = {{"budgets", c.budgets}};
  j["timing"] = {{"iterations", c.timing.iterations}, {"repetitions", c.timing.repetitions}};
  return j;
}

}  // namespace hmsbl
