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

// Command-line front end: run experiment specs, sweeps and figure emission.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "skysum/calibrate.hpp"
#include "skysum/error.hpp"
#include "skysum/experiment.hpp"
#include "skysum/figures.hpp"
#include "skysum/io.hpp"

namespace {

namespace fs = std::filesystem;
using skysum::io::Json;
namespace ex = skysum::experiment;

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<std::string> out;
  std::optional<std::int64_t> trials;

  void add_to(CLI::App* app, bool with_trials = true) {
    app->add_option("--seed", seed, "RNG seed (64-bit)");
    app->add_option("--preset", preset, "calibration preset (paper2024, paper2024_twotrack)");
    app->add_option("--out", out, "output directory");
    if (with_trials) app->add_option("--trials", trials, "Monte Carlo trials / repeats");
  }

  // Flags override the document.
  void apply(Json& spec) const {
    if (seed) spec["seed"] = *seed;
    if (out) spec["output_dir"] = *out;
    if (preset) {
      if (!spec.contains("calibration") || !spec["calibration"].is_object()) spec["calibration"] = Json::object();
      spec["calibration"]["preset"] = *preset;
    }
    if (trials) {
      if (!spec.contains("params") || !spec["params"].is_object()) spec["params"] = Json::object();
      const std::string proto = spec.value("protocol", "");
      const bool uses_trials = proto == "montecarlo_sigma" || proto == "netsim";
      spec["params"][uses_trials ? "trials" : "repeats"] = *trials;
    }
  }
};

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stoll(cell));
    } catch (const std::exception&) {
      throw skysum::ValidationError("input", "not an integer: '" + cell + "'");
    }
  }
  return out;
}

void run_spec(Json spec, const Common& c, const fs::path& base_dir) {
  c.apply(spec);
  const auto parsed = ex::parse_spec(spec, base_dir);
  std::cout << ex::run_experiment(parsed).string() << "\n";
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Stochastic skyrmion weighted-sum simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ex::kVersion));

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "fit nucleation traces into a calibration file");
  std::string cal_traces, cal_out, cal_preset = "paper2024";
  std::optional<std::string> cal_detection;
  cal_cmd->add_option("--traces", cal_traces, "traces.csv from a field nucleation_sweep")->required();
  cal_cmd->add_option("--detection", cal_detection, "trace.csv from a detection_run");
  cal_cmd->add_option("--preset", cal_preset, "base calibration preset");
  cal_cmd->add_option("--out", cal_out, "output calibration JSON")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "run one experiment spec");
  std::string run_file;
  Common run_c;
  run_cmd->add_option("spec", run_file, "experiment spec (JSON)")->required();
  run_c.add_to(run_cmd);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a grid of specs: {\"base\": spec, \"grid\": {path: [values]}}");
  std::string sweep_file;
  Common sweep_c;
  sweep_cmd->add_option("spec", sweep_file, "sweep document (JSON)")->required();
  sweep_c.add_to(sweep_cmd);

  // montecarlo
  auto* mc_cmd = app.add_subcommand("montecarlo", "sigma vs N_pulse for several p(1)");
  std::vector<double> mc_p1{0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::int64_t> mc_n{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  Common mc_c;
  mc_cmd->add_option("--p1", mc_p1, "p(1) values")->delimiter(',');
  mc_cmd->add_option("--n", mc_n, "pulse counts")->delimiter(',');
  mc_c.add_to(mc_cmd);

  // pareto
  auto* par_cmd = app.add_subcommand("pareto", "precision/energy curves per energy preset");
  std::int64_t par_m = 10, par_nmax = 100;
  double par_p = 0.4;
  Common par_c;
  par_cmd->add_option("--m", par_m, "synapses per sum");
  par_cmd->add_option("--p-bar", par_p, "deviation probability");
  par_cmd->add_option("--n-max", par_nmax, "largest pulse count");
  par_c.add_to(par_cmd, false);

  // netsim
  auto* net_cmd = app.add_subcommand("netsim", "quantise a weight matrix and run inference");
  std::string net_weights, net_readout = "linear_ahe";
  std::vector<std::string> net_inputs;
  int net_states = 15;
  double net_p = 0.4;
  Common net_c;
  net_cmd->add_option("--weights", net_weights, "weight matrix CSV (rows = inputs)")->required();
  net_cmd->add_option("--input", net_inputs, "comma-separated pulse counts; repeatable")->required();
  net_cmd->add_option("--states", net_states, "quantisation levels");
  net_cmd->add_option("--readout", net_readout, "linear_ahe or mtj");
  net_cmd->add_option("--p-bar", net_p, "deviation probability");
  net_c.add_to(net_cmd);

  // emit
  auto* emit_cmd = app.add_subcommand("emit", "write plot-ready CSV for a figure");
  std::string emit_dir;
  std::vector<std::string> emit_ids;
  emit_cmd->add_option("run_dir", emit_dir, "run directory")->required();
  emit_cmd->add_option("figure", emit_ids, "figure ids (2e 2g 2h 3 4e 5b 5c)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  if (*cal_cmd) {
    std::optional<fs::path> det;
    if (cal_detection) det = *cal_detection;
    const auto res = skysum::calibrate::calibrate(cal_preset, cal_traces, det);
    skysum::io::write_json(cal_out, res.document);
    std::cout << cal_out << "\n";
  } else if (*run_cmd) {
    const fs::path file = run_file;
    run_spec(skysum::io::read_json(file), run_c, file.parent_path());
  } else if (*sweep_cmd) {
    const fs::path file = sweep_file;
    const Json doc = skysum::io::read_json(file);
    if (!doc.is_object() || !doc.contains("base") || !doc.contains("grid")) {
      throw skysum::ValidationError("sweep", "expected {\"base\": spec, \"grid\": {...}}");
    }
    Json base = doc["base"];
    sweep_c.apply(base);
    const fs::path out = sweep_c.out ? fs::path(*sweep_c.out)
                                     : fs::path("runs") / base.value("name", std::string("sweep"));
    for (const auto& d : ex::run_sweep(base, doc["grid"], out, file.parent_path())) {
      std::cout << d.string() << "\n";
    }
  } else if (*mc_cmd) {
    Json spec{{"name", "montecarlo"}, {"protocol", "montecarlo_sigma"},
              {"params", {{"p1_values", mc_p1}, {"n_pulses", mc_n}}}};
    run_spec(spec, mc_c, {});
  } else if (*par_cmd) {
    Json spec{{"name", "pareto"}, {"protocol", "pareto"},
              {"params", {{"m", par_m}, {"p_bar", par_p}, {"n_max", par_nmax}}}};
    run_spec(spec, par_c, {});
  } else if (*net_cmd) {
    Json inputs = Json::array();
    for (const auto& s : net_inputs) inputs.push_back(parse_int_list(s));
    Json spec{{"name", "netsim"}, {"protocol", "netsim"},
              {"stochastic", {{"p_bar", net_p}}},
              {"params", {{"weights_file", fs::absolute(net_weights).string()}, {"inputs", inputs},
                          {"states", net_states}, {"readout", net_readout}}}};
    run_spec(spec, net_c, {});
  } else if (*emit_cmd) {
    for (const auto& id : emit_ids) {
      std::cout << skysum::figures::emit_figure_data(emit_dir, id).string() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const skysum::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
