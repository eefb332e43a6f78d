// Copyright 2026 The skysum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "skysum/figures.hpp"

#include <utility>

#include <fmt/format.h>

#include "skysum/error.hpp"
#include "skysum/io.hpp"

namespace skysum::figures {

std::vector<std::string> figure_ids() { return {"2e", "2g", "2h", "3", "4e", "5b", "5c"}; }

namespace {

using Columns = std::vector<std::pair<std::string, std::string>>;  // source -> output name

io::CsvTable select(const io::CsvTable& in, const Columns& cols) {
  io::CsvTable out;
  std::vector<std::size_t> idx;
  for (const auto& [src, dst] : cols) {
    idx.push_back(in.column(src));
    out.header.push_back(dst);
  }
  for (const auto& row : in.rows) {
    std::vector<std::string> r;
    for (auto i : idx) r.push_back(row[i]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

struct RunInfo {
  std::string protocol;
  std::string variable;
};

RunInfo run_info(const std::filesystem::path& dir) {
  const auto cfg_path = dir / "config.json";
  if (!std::filesystem::exists(cfg_path)) {
    throw MissingArtifact("no config.json in " + dir.string());
  }
  const auto cfg = io::read_json(cfg_path);
  RunInfo info;
  info.protocol = cfg.value("protocol", "");
  if (cfg.contains("params") && cfg["params"].is_object()) {
    info.variable = cfg["params"].value("variable", "field");
  }
  return info;
}

void need(const RunInfo& info, std::string_view protocol, std::string_view id) {
  if (info.protocol != protocol) {
    throw MissingArtifact(fmt::format("figure {} needs a {} run, found {}", id, protocol,
                                      info.protocol.empty() ? "none" : info.protocol));
  }
}

void need_variable(const RunInfo& info, std::string_view variable, std::string_view id) {
  need(info, "nucleation_sweep", id);
  if (info.variable != variable) {
    throw MissingArtifact(
        fmt::format("figure {} needs a nucleation_sweep over {}, found {}", id, variable, info.variable));
  }
}

}  // namespace

std::filesystem::path emit_figure_data(const std::filesystem::path& run_dir, std::string_view id) {
  bool known = false;
  for (const auto& f : figure_ids()) known |= f == id;
  if (!known) {
    throw ValidationError("figure_id", fmt::format("unknown figure '{}' (expected one of 2e, 2g, 2h, 3, 4e, 5b, 5c)", id));
  }
  const auto info = run_info(run_dir);
  io::CsvTable out;
  if (id == "2e") {
    need_variable(info, "current", id);
    out = select(io::read_csv(run_dir / "curves.csv"),
                 {{"current_density_GAm2", "current_density_GAm2"}, {"pulse_index", "n_pulses"},
                  {"mean_cumulative", "n_sk_mean"}, {"std_cumulative", "n_sk_std"}});
  } else if (id == "2g") {
    need_variable(info, "field", id);
    out = select(io::read_csv(run_dir / "curves.csv"),
                 {{"h_z_mT", "h_z_mT"}, {"pulse_index", "n_pulses"},
                  {"mean_cumulative", "n_sk_mean"}, {"std_cumulative", "n_sk_std"}});
  } else if (id == "2h") {
    need_variable(info, "field", id);
    out = select(io::read_csv(run_dir / "slopes.csv"),
                 {{"h_z_mT", "h_z_mT"}, {"slope_mean", "slope_sk_per_pulse"}, {"slope_std", "slope_std"}});
  } else if (id == "3" || id == "4e") {
    need(info, id == "3" ? "detection_run" : "fig4_twotrack", id);
    auto trace = run_dir / "trace_corrected.csv";
    if (!std::filesystem::exists(trace)) trace = run_dir / "trace.csv";
    out = select(io::read_csv(trace), {{"index", "measurement_iteration"}, {"phase", "phase"},
                                       {"delta_v_nV", "delta_v_nV"}, {"n_detec", "n_detec"}});
  } else if (id == "5b") {
    need(info, "montecarlo_sigma", id);
    out = select(io::read_csv(run_dir / "sigma.csv"), {{"p1", "p1"}, {"n_pulse", "n_pulse"},
                                                      {"sigma_mc", "sigma_mc"},
                                                      {"sigma_analytic", "sigma_analytic"}});
  } else {
    need(info, "pareto", id);
    out = select(io::read_csv(run_dir / "pareto.csv"),
                 {{"precision", "precision"}, {"energy_J", "energy_J"}, {"preset", "preset"}});
  }
  const auto path = run_dir / "figures" / fmt::format("fig_{}.csv", id);
  io::write_text(path, io::to_csv(out));
  return path;
}

}  // namespace skysum::figures
