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


#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>

#include "hmsbl/experiment.hpp"

namespace hmsbl {

using nlohmann::json;

namespace {

// NaN has no JSON spelling; store it as null and read null back as NaN.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double read_number(const json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

double read_number(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? std::numeric_limits<double>::quiet_NaN() : read_number(*it);
}

json numbers(const std::vector<double>& xs) {
  json arr = json::array();
  for (const double x : xs) arr.push_back(number(x));
  return arr;
}

std::vector<double> read_numbers(const json& j) {
  std::vector<double> out;
  if (!j.is_array()) return out;
  for (const auto& x : j) out.push_back(read_number(x));
  return out;
}

json diagnostics_to_json(const Diagnostics& d) {
  return {{"iterations", d.iterations},
          {"converged", d.converged},
          {"cost_trace", numbers(d.cost_trace)},
          {"iteration_seconds", numbers(d.iteration_seconds)},
          {"active_counts", d.active_counts},
          {"lambda_trace", numbers(d.lambda_trace)}};
}

Diagnostics diagnostics_from_json(const json& j) {
  Diagnostics d;
  d.iterations = j.value("iterations", 0);
  d.converged = j.value("converged", false);
  d.cost_trace = read_numbers(j.value("cost_trace", json::array()));
  d.iteration_seconds = read_numbers(j.value("iteration_seconds", json::array()));
  d.active_counts = j.value("active_counts", std::vector<Index>{});
  d.lambda_trace = read_numbers(j.value("lambda_trace", json::array()));
  return d;
}

json match_to_json(const MatchReport& m) {
  return {{"assignment", m.assignment},
          {"per_source_sq_err", numbers(m.per_source_sq_err)},
          {"rmse", number(m.rmse)},
          {"unmatched", m.unmatched}};
}

MatchReport match_from_json(const json& j) {
  MatchReport m;
  m.assignment = j.value("assignment", std::vector<Index>{});
  m.per_source_sq_err = read_numbers(j.value("per_source_sq_err", json::array()));
  m.rmse = read_number(j, "rmse");
  m.unmatched = j.value("unmatched", false);
  return m;
}

json sources_to_json(const std::vector<Source>& s) {
  json arr = json::array();
  for (const auto& x : s) arr.push_back({{"u", x.u}, {"v", x.v}});
  return arr;
}

std::vector<Source> sources_from_json(const json& j) {
  std::vector<Source> out;
  for (const auto& x : j) out.push_back({read_number(x.at("u")), read_number(x.at("v"))});
  return out;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, const char* header) {
  std::ofstream out(path);
  if (!out) throw std::filesystem::filesystem_error("cannot write plot data", path,
                                                    std::make_error_code(std::errc::io_error));
  out << header << '\n';
  return out;
}

}  // namespace

json record_to_json(const ResultRecord& r) {
  json trials = json::array();
  for (const auto& t : r.trials) {
    json runs = json::array();
    for (const auto& run : t.runs) {
      json est = json::array();
      for (const auto& e : run.estimates) {
        est.push_back({{"u", e.u},
                       {"v", e.v},
                       {"block", e.block},
                       {"eigen_gap", number(e.eigen_gap)},
                       {"low_confidence", e.low_confidence}});
      }
      json jr = {{"algorithm", run.algorithm},
                 {"estimates", est},
                 {"diagnostics", diagnostics_to_json(run.diagnostics)},
                 {"rmse_by_iteration", numbers(run.rmse_by_iteration)},
                 {"peak_fallback", run.peak_fallback},
                 {"error", run.error}};
      jr["match"] = run.match ? match_to_json(*run.match) : json(nullptr);
      runs.push_back(std::move(jr));
    }
    trials.push_back({{"trial", t.trial}, {"truth", sources_to_json(t.truth)}, {"runs", runs}});
  }

  json summary = json::object();
  for (const auto& [name, s] : r.summary) {
    summary[name] = {{"count", s.count},
                     {"mean_rmse", number(s.mean_rmse)},
                     {"std_rmse", number(s.std_rmse)},
                     {"success_rate", number(s.success_rate)}};
  }
  json timing = json::array();
  for (const auto& t : r.timing) {
    timing.push_back({{"algorithm", t.algorithm},
                      {"mv", t.mv},
                      {"grid_columns", t.grid_columns},
                      {"median_seconds", number(t.median_seconds)},
                      {"seconds_per_iteration", number(t.seconds_per_iteration)}});
  }
  json conv = json::array();
  for (const auto& c : r.convergence) {
    conv.push_back({{"iteration", c.iteration}, {"algorithm", c.algorithm}, {"rmse", number(c.rmse)}});
  }
  return {{"tool_version", r.tool_version},
          {"timestamp", r.timestamp},
          {"config", r.config},
          {"trials", trials},
          {"summary", summary},
          {"timing", timing},
          {"convergence", conv}};
}

ResultRecord record_from_json(const json& j) {
  ResultRecord r;
  r.tool_version = j.value("tool_version", "");
  r.timestamp = j.value("timestamp", "");
  r.config = j.value("config", json::object());
  for (const auto& jt : j.value("trials", json::array())) {
    TrialRecord t;
    t.trial = jt.value("trial", 0);
    t.truth = sources_from_json(jt.value("truth", json::array()));
    for (const auto& jr : jt.value("runs", json::array())) {
      AlgorithmRun run;
      run.algorithm = jr.value("algorithm", "");
      for (const auto& e : jr.value("estimates", json::array())) {
        run.estimates.push_back({read_number(e.at("u")), read_number(e.at("v")), e.value("block", Index{-1}),
                                 read_number(e, "eigen_gap"), e.value("low_confidence", false)});
      }
      run.diagnostics = diagnostics_from_json(jr.value("diagnostics", json::object()));
      run.rmse_by_iteration = read_numbers(jr.value("rmse_by_iteration", json::array()));
      run.peak_fallback = jr.value("peak_fallback", false);
      run.error = jr.value("error", "");
      if (jr.contains("match") && jr["match"].is_object()) run.match = match_from_json(jr["match"]);
      t.runs.push_back(std::move(run));
    }
    r.trials.push_back(std::move(t));
  }
  const json summary = j.value("summary", json::object());
  for (const auto& [name, s] : summary.items()) {
    r.summary[name] = {s.value("count", std::size_t{0}), read_number(s, "mean_rmse"),
                       read_number(s, "std_rmse"), read_number(s, "success_rate")};
  }
  for (const auto& t : j.value("timing", json::array())) {
    r.timing.push_back({t.value("algorithm", ""), t.value("mv", 0), t.value("grid_columns", Index{0}),
                        read_number(t, "median_seconds"),
                        read_number(t, "seconds_per_iteration")});
  }
  for (const auto& c : j.value("convergence", json::array())) {
    r.convergence.push_back({c.value("iteration", 0), c.value("algorithm", ""), read_number(c, "rmse")});
  }
  return r;
}

std::optional<PlotKind> parse_plot_kind(const std::string& name) {
  if (name == "timing") return PlotKind::timing;
  if (name == "scatter") return PlotKind::scatter;
  if (name == "convergence") return PlotKind::convergence;
  if (name == "all") return PlotKind::all;
  return std::nullopt;
}

std::vector<std::filesystem::path> emit_plot_data(const ResultRecord& record, PlotKind kind,
                                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const bool all = kind == PlotKind::all;

  if (all || kind == PlotKind::timing) {
    const auto path = dir / "timing.csv";
    auto out = open_csv(path, "mv,seconds,algorithm");
    for (const auto& t : record.timing) {
      out << t.mv << ',' << fmt(t.seconds_per_iteration) << ',' << t.algorithm << '\n';
    }
    written.push_back(path);
  }
  if (all || kind == PlotKind::scatter) {
    const auto path = dir / "scatter.csv";
    auto out = open_csv(path, "trial,u,v,is_truth,algorithm");
    for (const auto& t : record.trials) {
      for (const auto& s : t.truth) out << t.trial << ',' << fmt(s.u) << ',' << fmt(s.v) << ",1,truth\n";
      for (const auto& run : t.runs) {
        for (const auto& e : run.estimates) {
          out << t.trial << ',' << fmt(e.u) << ',' << fmt(e.v) << ",0," << run.algorithm << '\n';
        }
      }
    }
    written.push_back(path);
  }
  if (all || kind == PlotKind::convergence) {
    const auto path = dir / "convergence.csv";
    auto out = open_csv(path, "iteration,rmse,algorithm");
    for (const auto& c : record.convergence) {
      out << c.iteration << ',' << fmt(c.rmse) << ',' << c.algorithm << '\n';
    }
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> write_result(const ResultRecord& record,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "record.json";
  std::ofstream out(path);
  if (!out) throw std::filesystem::filesystem_error("cannot write result record", path,
                                                    std::make_error_code(std::errc::io_error));
  out << record_to_json(record).dump(2) << '\n';
  auto written = emit_plot_data(record, PlotKind::all, dir);
  written.insert(written.begin(), path);
  return written;
}

}  // namespace hmsbl
